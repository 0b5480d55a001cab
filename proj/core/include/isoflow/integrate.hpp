#pragma once

// Adaptive embedded Runge-Kutta 4(5) integration of ODEs on Sym(n), and the
// two trajectory monitors: spectral drift d_ev and off-diagonal mass d_off.

#include "isoflow/symspace.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace isoflow {

/// Side channel a field evaluation can use to report a rank-deficient solve.
struct FieldStatus {
  bool singular = false;
};

using VectorField = std::function<SymMatrix(const SymMatrix&, FieldStatus&)>;

/// Adapts a field that never reports diagnostics.
VectorField plain_field(std::function<SymMatrix(const SymMatrix&)> f);

struct IntegratorConfig {
  double abstol = 1e-13;
  double reltol = 1e-13;
  double t_final = 1.0;
  std::int64_t max_steps = 10'000'000;
  /// Defaults to min(1e-3, t_final / 100).
  std::optional<double> initial_step;
  /// Monitor spacing; defaults to t_final / 400.
  std::optional<double> sample_interval;
  /// Shorten steps so that every sample point is hit exactly. Off by default,
  /// in which case samples are taken at the first accepted step past each
  /// sample point.
  bool hit_sample_times = false;
  /// Store the state at every sample.
  bool keep_snapshots = false;

  /// Throws InputError for non-positive tolerances, times or intervals.
  void validate() const;
  double interval() const { return sample_interval.value_or(t_final / 400.0); }
};

/// ||ev(X0) - ev(X)||_2 / ||ev(X0)||_2 with ascending eigenvalues.
/// Throws NumericalError when X0 has an all-zero spectrum.
double d_ev(const SymMatrix& X0, const SymMatrix& X);

/// ||X - diag(X)||_F / ||X0 - diag(X0)||_F. Throws NumericalError for diagonal X0.
double d_off(const SymMatrix& X0, const SymMatrix& X);

/// Precomputes the reference quantities of d_ev, d_off and f for one trajectory.
/// A monitor whose reference is degenerate (zero spectrum, diagonal X0)
/// is reported as NaN instead of throwing.
class MonitorSet {
 public:
  MonitorSet(SymMatrix X0, SymMatrix D);

  struct Sample {
    double d_ev;
    double d_off;
    double f;
  };
  Sample operator()(const SymMatrix& X) const;

 private:
  SymMatrix D_;
  Vector ev0_;
  double ev0_norm_;
  double off0_norm_;
};

struct TrajectoryLog {
  std::vector<double> times;
  std::vector<double> d_ev;
  std::vector<double> d_off;
  std::vector<double> f;
  std::vector<SymMatrix> snapshots;  // filled when keep_snapshots is set

  std::int64_t accepted_steps = 0;
  std::int64_t rejected_steps = 0;
  std::int64_t field_evaluations = 0;
  std::int64_t singular_flag_count = 0;
  /// max_steps was reached before t_final.
  bool truncated = false;
  double final_time = 0.0;
  SymMatrix final_state;

  std::size_t size() const { return times.size(); }
  /// Largest d_ev sample, ignoring NaN; 0 for an empty log.
  double max_d_ev() const;
  /// First sample time with d_off <= threshold, if any.
  std::optional<double> first_time_d_off_below(double threshold) const;
};

/// Dormand-Prince 5(4) with FSAL and a per-entry mixed error norm.
///
/// Throws StiffnessError when the step size drops below 1e-14 * t_final.
/// Reaching max_steps returns the partial log with `truncated` set.
TrajectoryLog rk45_integrate(const VectorField& field, const SymMatrix& X0, const IntegratorConfig& cfg,
                             const std::optional<MonitorSet>& monitors = std::nullopt);

}  // namespace isoflow
