#include "isoflow/experiments.hpp"

#include "isoflow/errors.hpp"
#include "isoflow/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace isoflow {

namespace fs = std::filesystem;

namespace {

double max_outside(const SparsityPattern& pattern, const SymMatrix& X) {
  return (X - pattern_project(pattern, X)).max_abs();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << "t,d_ev,d_off,f\n" << std::setprecision(17);
  for (std::size_t k = 0; k < log.size(); ++k) {
    out << log.times[k] << ',' << log.d_ev[k] << ',' << log.d_off[k] << ',' << log.f[k] << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

std::string plot_script(const std::vector<std::pair<std::string, std::string>>& series, const std::string& png) {
  std::ostringstream s;
  s << "# gnuplot script: relative off-diagonal mass d_off(t), log scale\n"
    << "set terminal pngcairo size 900,560\n"
    << "set output '" << png << "'\n"
    << "set datafile separator ','\n"
    << "set logscale y\n"
    << "set format y '10^{%L}'\n"
    << "set xlabel 't'\n"
    << "set ylabel 'd_{off}(t)'\n"
    << "set key top right\n"
    << "plot ";
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (k) s << ", \\\n     ";
    s << "'" << series[k].first << "' using 1:3 every ::1 with lines lw 2 title '" << series[k].second << "'";
  }
  s << '\n';
  return s.str();
}

RunReport run_flow(const Fixture& fx, FlowKind kind, const IntegratorConfig& cfg,
                   const std::optional<fs::path>& out_dir) {
  const FlowProblem problem = FlowProblem::make(kind, fx.X0);
  RunReport report;
  report.fixture = fx.name;
  report.flow = kind;
  report.config = cfg;

  // Every stage input passes through the field, so this sees every state
  // the integrator ever forms.
  double off_pattern = 0.0;
  const VectorField inner = make_field(problem);
  const VectorField field = [&](const SymMatrix& X, FieldStatus& status) {
    off_pattern = std::max(off_pattern, max_outside(problem.pattern, X));
    return inner(X, status);
  };

  const auto start = std::chrono::steady_clock::now();
  report.log = rk45_integrate(field, problem.X0, cfg, MonitorSet(problem.X0, problem.D));
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const TrajectoryLog& log = report.log;
  report.max_d_ev = log.max_d_ev();
  report.final_d_off = log.d_off.back();
  report.final_f = log.f.back();
  report.truncated = log.truncated;
  report.singular_flag_count = log.singular_flag_count;
  report.max_off_pattern = std::max(off_pattern, max_outside(problem.pattern, log.final_state));

  if (out_dir) {
    fs::create_directories(*out_dir);
    const fs::path csv = *out_dir / "trajectory.csv";
    {
      std::ofstream out(csv);
      if (!out) throw InputError("cannot write '" + csv.string() + "'");
      write_trajectory_csv(out, log);
    }
    const fs::path mat = *out_dir / "final.mat";
    save_matrix(mat.string(), log.final_state);
    const fs::path gp = *out_dir / "plot_doff.gp";
    write_text(gp, plot_script({{"trajectory.csv", fx.name + " " + to_string(kind)}}, "doff.png"));
    report.outputs = {csv, mat, gp};
  }
  return report;
}

CompareReport compare_flows(const Fixture& fx, const IntegratorConfig& cfg, const std::optional<fs::path>& out_dir) {
  auto dir_for = [&](const char* sub) -> std::optional<fs::path> {
    if (!out_dir) return std::nullopt;
    return *out_dir / sub;
  };
  auto zero = std::async(std::launch::async, [&] { return run_flow(fx, FlowKind::zero, cfg, dir_for("zero")); });
  auto db = std::async(std::launch::async, [&] { return run_flow(fx, FlowKind::double_bracket, cfg, dir_for("db")); });

  CompareReport report{zero.get(), db.get(), {}};
  if (out_dir) {
    const fs::path merged = *out_dir / "compare.csv";
    std::ofstream out(merged);
    if (!out) throw InputError("cannot write '" + merged.string() + "'");
    out << "flow,t,d_ev,d_off,f\n" << std::setprecision(17);
    for (const RunReport* r : {&report.zero, &report.db}) {
      const auto& log = r->log;
      for (std::size_t k = 0; k < log.size(); ++k) {
        out << to_string(r->flow) << ',' << log.times[k] << ',' << log.d_ev[k] << ',' << log.d_off[k] << ','
            << log.f[k] << '\n';
      }
    }
    const fs::path gp = *out_dir / "plot_doff.gp";
    write_text(gp, plot_script({{"zero/trajectory.csv", "Zero flow"}, {"db/trajectory.csv", "DB flow"}},
                               "doff_compare.png"));
    report.outputs = {merged, gp};
  }
  return report;
}

ScalingReport scaling_check(double c, const Fixture& fx, double t_final, IntegratorConfig cfg) {
  if (!(c > 0.0)) throw InputError("scaling factor c must be positive");
  const SymMatrix D = SymMatrix::ramp(fx.X0.n());
  const VectorField field = plain_field([&D](const SymMatrix& X) { return double_bracket_field(X, D); });

  const double interval = cfg.sample_interval.value_or(t_final / 400.0);
  cfg.hit_sample_times = true;
  cfg.keep_snapshots = true;

  IntegratorConfig slow = cfg;
  slow.t_final = c * t_final;
  slow.sample_interval = c * interval;
  IntegratorConfig fast = cfg;
  fast.t_final = t_final;
  fast.sample_interval = interval;

  const TrajectoryLog X = rk45_integrate(field, fx.X0, slow);
  const TrajectoryLog Y = rk45_integrate(field, c * fx.X0, fast);

  ScalingReport r;
  r.c = c;
  r.tolerance = 1e-7 * c * fx.X0.frobenius_norm();
  r.samples = std::min(X.size(), Y.size());
  for (std::size_t k = 0; k < r.samples; ++k) {
    r.max_deviation = std::max(r.max_deviation, (c * X.snapshots[k] - Y.snapshots[k]).frobenius_norm());
  }
  r.passed = X.size() == Y.size() && !X.truncated && !Y.truncated && r.max_deviation <= r.tolerance;
  return r;
}

InstabilityProbe shader_instability_probe(double delta, double t_limit, std::uint64_t seed) {
  const ShaderCounterexample sh = shader_counterexample(1.0, 2.0, 2.0);
  const SparsityPattern pattern = SparsityPattern::nonzeros_of(sh.E);
  Rng rng(seed);
  SymMatrix R = random_in_pattern(rng, pattern);
  R *= 1.0 / R.frobenius_norm();

  const FlowProblem problem = FlowProblem::make(FlowKind::zero, sh.E + delta * R, sh.D, pattern);
  IntegratorConfig cfg;
  cfg.t_final = t_limit;
  cfg.sample_interval = t_limit / 2000.0;
  cfg.keep_snapshots = true;
  const TrajectoryLog log = rk45_integrate(make_field(problem), problem.X0, cfg);

  InstabilityProbe probe;
  probe.delta = delta;
  probe.t_limit = t_limit;
  for (std::size_t k = 0; k < log.size(); ++k) {
    const double dist = (log.snapshots[k] - sh.E).frobenius_norm();
    probe.max_distance = std::max(probe.max_distance, dist);
    if (!probe.escaped && dist > 10.0 * delta && log.times[k] < t_limit) {
      probe.escaped = true;
      probe.escape_time = log.times[k];
    }
  }
  return probe;
}

CounterexampleReport counterexamples() {
  CounterexampleReport r;
  const ShaderCounterexample sh = shader_counterexample(1.0, 2.0, 2.0);
  const SparsityPattern shader_pattern = SparsityPattern::nonzeros_of(sh.E);
  r.shader_residual = equilibrium_residual(sh.E, sh.D, shader_pattern).residual;
  r.shader_tolerance = equilibrium_tolerance(sh.E, sh.D);
  r.shader_field_norm = zero_flow_field(sh.E, sh.D, shader_pattern).frobenius_norm();
  r.probe = shader_instability_probe();

  const CirculantWitness w = circulant_kernel_witness();
  const SparsityPattern circ_pattern = SparsityPattern::nonzeros_of(w.X);
  const SymOperator S = double_bracket_operator(w.X) + pattern_operator(circ_pattern);
  r.circulant_kernel_residual = S.apply(w.Y).frobenius_norm();
  r.circulant_mY_zero = pattern_project(circ_pattern, w.Y) == SymMatrix(4);
  r.circulant_min_eigenvalue = sym_eigen(S.coeffs()).values[0];

  r.passed = r.shader_residual <= r.shader_tolerance && r.shader_field_norm <= 1e-10 && r.probe.escaped &&
             r.circulant_kernel_residual <= 1e-12 && r.circulant_mY_zero &&
             std::abs(r.circulant_min_eigenvalue) <= 1e-12;
  return r;
}

}  // namespace isoflow
