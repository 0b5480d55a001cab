#include "isoflow/integrate.hpp"

#include "isoflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace isoflow {

namespace {

// Dormand-Prince 5(4) Butcher tableau.
//
//   0    |
//   1/5  | 1/5
//   3/10 | 3/40        9/40
//   4/5  | 44/45      -56/15      32/9
//   8/9  | 19372/6561 -25360/2187 64448/6561 -212/729
//   1    | 9017/3168  -355/33     46732/5247  49/176  -5103/18656
//   1    | 35/384      0          500/1113    125/192 -2187/6784   11/84
//   -----+------------------------------------------------------------------
//   5th  | 35/384      0          500/1113    125/192 -2187/6784   11/84    0
//   4th  | 5179/57600  0          7571/16695  393/640 -92097/339200 187/2100 1/40
//
// The last stage is evaluated at the 5th-order solution, so it doubles as
// the first stage of the next step (FSAL).
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// b(5th) - b(4th)
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

}  // namespace

VectorField plain_field(std::function<SymMatrix(const SymMatrix&)> f) {
  return [f = std::move(f)](const SymMatrix& X, FieldStatus&) { return f(X); };
}

void IntegratorConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream msg;
      msg << name << " must be positive and finite, got " << v;
      throw InputError(msg.str());
    }
  };
  positive(abstol, "abstol");
  positive(reltol, "reltol");
  positive(t_final, "t_final");
  positive(interval(), "sample_interval");
  if (initial_step) positive(*initial_step, "initial_step");
  if (max_steps <= 0) throw InputError("max_steps must be positive");
}

double d_ev(const SymMatrix& X0, const SymMatrix& X) {
  if (X0.n() != X.n()) throw DimensionError("d_ev: order mismatch");
  const Vector ev0 = sym_eigen(X0).values;
  const double denom = ev0.norm();
  if (denom == 0.0) throw NumericalError("d_ev: reference spectrum is zero");
  return (ev0 - sym_eigen(X).values).norm() / denom;
}

double d_off(const SymMatrix& X0, const SymMatrix& X) {
  if (X0.n() != X.n()) throw DimensionError("d_off: order mismatch");
  const double denom = X0.off_diag_part().frobenius_norm();
  if (denom == 0.0) throw NumericalError("d_off: reference matrix is diagonal");
  return X.off_diag_part().frobenius_norm() / denom;
}

MonitorSet::MonitorSet(SymMatrix X0, SymMatrix D)
    : D_(std::move(D)),
      ev0_(sym_eigen(X0).values),
      ev0_norm_(ev0_.norm()),
      off0_norm_(X0.off_diag_part().frobenius_norm()) {
  if (X0.n() != D_.n()) throw DimensionError("MonitorSet: X0 and D orders differ");
}

MonitorSet::Sample MonitorSet::operator()(const SymMatrix& X) const {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  Sample s{nan, nan, nan};
  if (ev0_norm_ > 0.0) s.d_ev = (ev0_ - sym_eigen(X).values).norm() / ev0_norm_;
  if (off0_norm_ > 0.0) s.d_off = X.off_diag_part().frobenius_norm() / off0_norm_;
  const SymMatrix diff = X - D_;
  s.f = 0.5 * frobenius_inner(diff, diff);
  return s;
}

double TrajectoryLog::max_d_ev() const {
  double m = 0.0;
  for (double v : d_ev)
    if (!std::isnan(v)) m = std::max(m, v);
  return m;
}

std::optional<double> TrajectoryLog::first_time_d_off_below(double threshold) const {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (d_off[k] <= threshold) return times[k];
  return std::nullopt;
}

TrajectoryLog rk45_integrate(const VectorField& field, const SymMatrix& X0, const IntegratorConfig& cfg,
                             const std::optional<MonitorSet>& monitors) {
  cfg.validate();
  const double tf = cfg.t_final;
  const double interval = cfg.interval();
  const double h_min = 1e-14 * tf;

  TrajectoryLog log;
  FieldStatus status;
  auto eval = [&](const SymMatrix& X) {
    status.singular = false;
    SymMatrix k = field(X, status);
    ++log.field_evaluations;
    if (status.singular) ++log.singular_flag_count;
    return k;
  };
  auto record = [&](double t, const SymMatrix& X) {
    log.times.push_back(t);
    if (monitors) {
      const auto s = (*monitors)(X);
      log.d_ev.push_back(s.d_ev);
      log.d_off.push_back(s.d_off);
      log.f.push_back(s.f);
    } else {
      constexpr double nan = std::numeric_limits<double>::quiet_NaN();
      log.d_ev.push_back(nan);
      log.d_off.push_back(nan);
      log.f.push_back(nan);
    }
    if (cfg.keep_snapshots) log.snapshots.push_back(X);
  };

  const int n = X0.n();
  Vector y = X0.packed();
  auto as_sym = [n](const Vector& v) { return SymMatrix::from_packed(n, v); };

  double t = 0.0;
  double h = cfg.initial_step.value_or(std::min(1e-3, tf / 100.0));
  std::int64_t sample_index = 1;
  auto sample_time = [&](std::int64_t k) { return static_cast<double>(k) * interval; };

  record(0.0, X0);
  Vector k1 = eval(X0).packed();
  Vector k2, k3, k4, k5, k6, k7, y_new, err;

  while (t < tf) {
    if (log.accepted_steps + log.rejected_steps >= cfg.max_steps) {
      log.truncated = true;
      break;
    }
    double step = h;
    bool to_end = false;
    bool to_sample = false;
    if (t + step >= tf) {
      step = tf - t;
      to_end = true;
    }
    const double ts = sample_time(sample_index);
    if (cfg.hit_sample_times && ts < tf && t + step >= ts) {
      step = ts - t;
      to_sample = true;
      to_end = false;
    }

    k2 = eval(as_sym(y + step * (a21 * k1))).packed();
    k3 = eval(as_sym(y + step * (a31 * k1 + a32 * k2))).packed();
    k4 = eval(as_sym(y + step * (a41 * k1 + a42 * k2 + a43 * k3))).packed();
    k5 = eval(as_sym(y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4))).packed();
    k6 = eval(as_sym(y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5))).packed();
    y_new = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    k7 = eval(as_sym(y_new)).packed();
    err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err_norm = 0.0;
    for (Eigen::Index p = 0; p < y.size(); ++p) {
      const double scale = cfg.abstol + cfg.reltol * std::max(std::abs(y[p]), std::abs(y_new[p]));
      err_norm = std::max(err_norm, std::abs(err[p]) / scale);
    }
    if (!std::isfinite(y_new.sum())) err_norm = std::numeric_limits<double>::infinity();

    double factor = err_norm == 0.0 ? kMaxFactor : kSafety * std::pow(err_norm, -0.2);
    if (!std::isfinite(factor)) factor = kMinFactor;
    factor = std::clamp(factor, kMinFactor, kMaxFactor);

    if (err_norm <= 1.0) {
      t = to_end ? tf : (to_sample ? ts : t + step);
      y.swap(y_new);
      k1.swap(k7);
      ++log.accepted_steps;
      const double proposed = step * factor;
      h = (to_end || to_sample) ? std::max(h, proposed) : proposed;

      if (t >= sample_time(sample_index) || t >= tf) {
        record(t, as_sym(y));
        while (sample_time(sample_index) <= t) ++sample_index;
      }
    } else {
      ++log.rejected_steps;
      h = step * factor;
      if (h < h_min) {
        std::ostringstream msg;
        msg << "step size " << h << " underflowed at t = " << t;
        throw StiffnessError(msg.str());
      }
    }
  }

  log.final_time = t;
  log.final_state = as_sym(y);
  if (log.times.back() != t) record(t, log.final_state);
  return log;
}

}  // namespace isoflow
