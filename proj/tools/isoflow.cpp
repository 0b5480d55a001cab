#include "isoflow/errors.hpp"
#include "isoflow/experiments.hpp"
#include "isoflow/selftest.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace isoflow;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit : int { kOk = 0, kAssertion = 2, kIntegrator = 3, kBadInput = 4 };

struct CommonOpts {
  std::string fixture = "example1";
  std::optional<double> tfinal;
  double abstol = 1e-13;
  double reltol = 1e-13;
  std::optional<double> interval;
  std::int64_t max_steps = 10'000'000;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--fixture", o.fixture, "fixture name or file:<path>")->capture_default_str();
  cmd->add_option("--tfinal", o.tfinal, "final time (default depends on the fixture)");
  cmd->add_option("--abstol", o.abstol, "absolute tolerance")->capture_default_str();
  cmd->add_option("--reltol", o.reltol, "relative tolerance")->capture_default_str();
  cmd->add_option("--interval", o.interval, "monitor sample interval (default tfinal/400)");
  cmd->add_option("--max-steps", o.max_steps, "step budget")->capture_default_str();
  cmd->add_option("--out", o.out, "output directory");
}

IntegratorConfig make_config(const CommonOpts& o, const Fixture& fx) {
  IntegratorConfig cfg;
  cfg.abstol = o.abstol;
  cfg.reltol = o.reltol;
  cfg.t_final = o.tfinal.value_or(default_t_final(fx.name));
  cfg.max_steps = o.max_steps;
  cfg.sample_interval = o.interval;
  cfg.validate();
  return cfg;
}

std::optional<fs::path> out_dir(const CommonOpts& o) {
  if (o.out.empty()) return std::nullopt;
  return fs::path(o.out);
}

json to_json(const RunReport& r) {
  json paths = json::array();
  for (const auto& p : r.outputs) paths.push_back(p.string());
  return {
      {"fixture", r.fixture},
      {"flow", to_string(r.flow)},
      {"config",
       {{"t_final", r.config.t_final},
        {"abstol", r.config.abstol},
        {"reltol", r.config.reltol},
        {"sample_interval", r.config.interval()},
        {"max_steps", r.config.max_steps}}},
      {"max_d_ev", r.max_d_ev},
      {"final_d_off", r.final_d_off},
      {"final_f", r.final_f},
      {"wall_time_s", r.wall_time_s},
      {"truncated", r.truncated},
      {"singular_flag_count", r.singular_flag_count},
      {"max_off_pattern", r.max_off_pattern},
      {"accepted_steps", r.log.accepted_steps},
      {"rejected_steps", r.log.rejected_steps},
      {"samples", r.log.size()},
      {"outputs", paths},
  };
}

void write_json(const std::optional<fs::path>& dir, const json& j) {
  if (!dir) return;
  fs::create_directories(*dir);
  std::ofstream out(*dir / "report.json");
  if (!out) throw InputError("cannot write report.json in '" + dir->string() + "'");
  out << j.dump(2) << '\n';
}

void print_run(const RunReport& r) {
  std::printf("%-10s %-5s t=%-8g max d_ev=%.3e  final d_off=%.3e  f=%.6e  steps=%lld  %.2fs%s\n", r.fixture.c_str(),
              to_string(r.flow).c_str(), r.config.t_final, r.max_d_ev, r.final_d_off, r.final_f,
              static_cast<long long>(r.log.accepted_steps), r.wall_time_s, r.truncated ? "  [truncated]" : "");
}

int cmd_run(const CommonOpts& o, const std::string& flow) {
  const Fixture fx = fixture(o.fixture);
  const RunReport r = run_flow(fx, parse_flow_kind(flow), make_config(o, fx), out_dir(o));
  print_run(r);
  write_json(out_dir(o), to_json(r));
  return r.truncated ? kIntegrator : kOk;
}

int cmd_compare(const CommonOpts& o) {
  const Fixture fx = fixture(o.fixture);
  const CompareReport c = compare_flows(fx, make_config(o, fx), out_dir(o));
  print_run(c.zero);
  print_run(c.db);
  const auto tz = c.zero.log.first_time_d_off_below(1e-6);
  const auto td = c.db.log.first_time_d_off_below(1e-6);
  auto show = [](const std::optional<double>& t) { return t ? std::to_string(*t) : std::string("never"); };
  std::printf("first t with d_off <= 1e-6: zero %s, db %s\n", show(tz).c_str(), show(td).c_str());
  json j = {{"zero", to_json(c.zero)}, {"db", to_json(c.db)}};
  j["first_time_d_off_below_1e-6"] = {{"zero", tz ? json(*tz) : json(nullptr)}, {"db", td ? json(*td) : json(nullptr)}};
  write_json(out_dir(o), j);
  return c.zero.truncated || c.db.truncated ? kIntegrator : kOk;
}

int cmd_scaling(const CommonOpts& o, double c) {
  const Fixture fx = fixture(o.fixture);
  IntegratorConfig cfg = make_config(o, fx);
  if (!o.tfinal) cfg.t_final = 1.0;
  const ScalingReport r = scaling_check(c, fx, cfg.t_final, cfg);
  std::printf("scaling c=%g fixture=%s: max ||c X(ct) - Y(t)|| = %.3e (tol %.3e, %zu samples) %s\n", c,
              fx.name.c_str(), r.max_deviation, r.tolerance, r.samples, r.passed ? "PASS" : "FAIL");
  write_json(out_dir(o), {{"c", r.c},
                          {"fixture", fx.name},
                          {"t_final", cfg.t_final},
                          {"max_deviation", r.max_deviation},
                          {"tolerance", r.tolerance},
                          {"samples", r.samples},
                          {"passed", r.passed}});
  return r.passed ? kOk : kAssertion;
}

int cmd_counterexamples(const std::string& out) {
  const CounterexampleReport r = counterexamples();
  std::printf("shader: equilibrium residual %.3e (tol %.3e), ||g(E)|| %.3e\n", r.shader_residual, r.shader_tolerance,
              r.shader_field_norm);
  std::printf("shader probe: delta %g, max ||X - E|| %.3e, escaped %s", r.probe.delta, r.probe.max_distance,
              r.probe.escaped ? "yes" : "no");
  if (r.probe.escape_time) std::printf(" at t=%.4g", *r.probe.escape_time);
  std::printf("\ncirculant: ||(A.X + m) Y|| %.3e, m Y == 0 %s, min eigenvalue %.3e\n", r.circulant_kernel_residual,
              r.circulant_mY_zero ? "yes" : "no", r.circulant_min_eigenvalue);
  std::printf("%s\n", r.passed ? "PASS" : "FAIL");
  if (!out.empty()) {
    json probe = {{"delta", r.probe.delta},
                  {"t_limit", r.probe.t_limit},
                  {"escaped", r.probe.escaped},
                  {"max_distance", r.probe.max_distance}};
    probe["escape_time"] = r.probe.escape_time ? json(*r.probe.escape_time) : json(nullptr);
    write_json(fs::path(out), {{"shader_residual", r.shader_residual},
                               {"shader_tolerance", r.shader_tolerance},
                               {"shader_field_norm", r.shader_field_norm},
                               {"probe", probe},
                               {"circulant_kernel_residual", r.circulant_kernel_residual},
                               {"circulant_mY_zero", r.circulant_mY_zero},
                               {"circulant_min_eigenvalue", r.circulant_min_eigenvalue},
                               {"passed", r.passed}});
  }
  return r.passed ? kOk : kAssertion;
}

int cmd_selftest(std::uint64_t seed) {
  bool all = true;
  for (const SuiteResult& s : run_selftest(seed)) {
    std::printf("%-4s %-55s %4d/%-4d worst %.2e\n", s.ok() ? "ok" : "FAIL", s.name.c_str(), s.passed, s.total,
                s.worst_ratio);
    all = all && s.ok();
  }
  std::printf("%s\n", all ? "selftest passed" : "selftest FAILED");
  return all ? kOk : kAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isoflow: parallel sums and iso-spectral flows on symmetric matrices"};
  app.require_subcommand(1);

  CommonOpts run_opts, cmp_opts, scale_opts;
  std::string flow = "zero";
  double c = 36.0;
  std::string cx_out;
  std::uint64_t seed = kSelftestSeed;

  auto* run = app.add_subcommand("run", "integrate one flow from a fixture");
  add_common(run, run_opts);
  run->add_option("--flow", flow, "zero | db | toda")->capture_default_str();

  auto* cmp = app.add_subcommand("compare", "run the zero and DB flows side by side");
  add_common(cmp, cmp_opts);

  auto* scale = app.add_subcommand("scaling", "check c X(ct) = Y(t) for the DB flow");
  scale_opts.fixture = "t5";
  add_common(scale, scale_opts);
  scale->add_option("--c", c, "scaling factor > 0")->capture_default_str();

  auto* cx = app.add_subcommand("counterexamples", "Shader equilibrium and circulant kernel witness");
  cx->add_option("--out", cx_out, "output directory for report.json");

  auto* st = app.add_subcommand("selftest", "seeded property suites");
  st->add_option("--seed", seed, "base seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  try {
    if (*run) return cmd_run(run_opts, flow);
    if (*cmp) return cmd_compare(cmp_opts);
    if (*scale) return cmd_scaling(scale_opts, c);
    if (*cx) return cmd_counterexamples(cx_out);
    if (*st) return cmd_selftest(seed);
  } catch (const StiffnessError& e) {
    std::cerr << "integrator failure: " << e.what() << '\n';
    return kIntegrator;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kIntegrator;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kBadInput;
  } catch (const std::domain_error& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kBadInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "bad input: " << e.what() << '\n';
    return kBadInput;
  }
  return kBadInput;
}
