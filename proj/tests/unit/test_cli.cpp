#include "isoflow/errors.hpp"
#include "isoflow/experiments.hpp"
#include "isoflow/fixtures.hpp"
#include "isoflow/random.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace isoflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("isoflow_test_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("example 1 fixture is the printed matrix") {
  const double printed[6][6] = {
      {0.87, 1.23, 0, 0, 0, 0},    {1.23, 1.67, 0.62, 0, 0, 0},    {0, 0.62, 0.25, 1.17, 0, 0},
      {0, 0, 1.17, 0.79, 1.87, 0}, {0, 0, 0, 1.87, 1.92, 1.63}, {0, 0, 0, 0, 1.63, 1.8},
  };
  const Fixture fx = fixture("example1");
  REQUIRE(fx.X0.n() == 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(fx.X0(i, j) == printed[i][j]);
  CHECK(SparsityPattern::nonzeros_of(fx.X0) == SparsityPattern::tridiagonal(6));
}

TEST_CASE("example 2 fixture is the printed matrix") {
  const double printed[10][10] = {
      {1.7, 0, 0, 0, 0, 0, 1.92, 0, 0.48, 1.25},
      {0, 1.16, 1.16, 0.91, 1.56, 0, 0, 1.69, 0, 0},
      {0, 1.16, 0.48, 0, 0.90, 0, 0, 0, 0, 0},
      {0, 0.91, 0, 0.66, 0.88, 0, 0.93, 1.25, 0, 1.39},
      {0, 1.56, 0.9, 0.88, 0.3, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 0.94, 1.49, 0.37, 0.88, 0},
      {1.92, 0, 0, 0.93, 0, 1.49, 1.12, 0.67, 0.4, 0},
      {0, 1.69, 0, 1.25, 0, 0.37, 0.67, 1.1, 0, 1.54},
      {0.48, 0, 0, 0, 0, 0.88, 0.4, 0, 0.44, 1.05},
      {1.25, 0, 0, 1.39, 0, 0, 0, 1.54, 1.05, 1.2},
  };
  const Fixture fx = fixture("example2");
  REQUIRE(fx.X0.n() == 10);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) CHECK(fx.X0(i, j) == printed[i][j]);

  // The pattern applied to all-ones is the 0/1 indicator of the nonzeros.
  const SymMatrix ones = SymMatrix::from_dense(Matrix::Ones(10, 10));
  const SymMatrix ind = pattern_project(SparsityPattern::nonzeros_of(fx.X0), ones);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) CHECK(ind(i, j) == (printed[i][j] != 0.0 ? 1.0 : 0.0));
}

TEST_CASE("tridiagonal Toeplitz fixtures") {
  const SymMatrix t5 = fixture("t5").X0;
  for (int i = 0; i < 5; ++i) {
    CHECK(t5(i, i) == -2.0);
    if (i + 1 < 5) CHECK(t5(i, i + 1) == 1.0);
    if (i + 2 < 5) CHECK(t5(i, i + 2) == 0.0);
  }
  CHECK(fixture("ts5").X0 == 36.0 * t5);
  CHECK(fixture("ts10").X0 == 121.0 * fixture("t10").X0);
  const Vector ev = sym_eigen(fixture("t10").X0).values;
  for (int k = 0; k < 10; ++k) {
    CHECK(ev[k] < 0.0);
    if (k) CHECK(ev[k] - ev[k - 1] > 1e-3);
    // Closed form for tridiag(1,-2,1): -2 + 2 cos(k pi / 11).
    CHECK(ev[k] == doctest::Approx(-2.0 + 2.0 * std::cos((10 - k) * M_PI / 11.0)).epsilon(1e-13));
  }
}

TEST_CASE("fixture checksums are stable") {
  const std::map<std::string, std::uint64_t> golden = {
      {"example1", 0x4d6395a7189c8284ULL}, {"example2", 0xd8d25e91c391ed58ULL}, {"t5", 0xf8f32cf5809d8c23ULL},
      {"t10", 0xaca85e3d2839e0e3ULL},      {"ts5", 0xaeff14d956eb0fa1ULL},      {"ts10", 0x4a073f1c399fe643ULL},
      {"shader", 0xfc8268e9330f23a3ULL},   {"circulant", 0x502337e345f75783ULL},
  };
  REQUIRE(fixture_names().size() == golden.size());
  for (const auto& name : fixture_names()) {
    INFO(name);
    CHECK(oracle::fnv1a(fixture(name).X0.dense()) == golden.at(name));
  }
}

TEST_CASE("fixture lookup errors and files") {
  CHECK_THROWS_AS(fixture("example3"), InputError);
  CHECK_THROWS_AS(fixture("file:/nonexistent/x.mat"), InputError);
  const fs::path dir = scratch("fixture_file");
  fs::create_directories(dir);
  const fs::path p = dir / "x.mat";
  save_matrix(p.string(), fixture("example1").X0);
  CHECK(fixture("file:" + p.string()).X0 == fixture("example1").X0);
  std::ofstream(dir / "bad.mat") << "2\n1 2\n3 4\n";
  CHECK_THROWS_AS(fixture("file:" + (dir / "bad.mat").string()), InputError);
  fs::remove_all(dir);
}

TEST_CASE("default horizons") {
  CHECK(default_t_final("example1") == 60.0);
  CHECK(default_t_final("example2") == 60.0);
  CHECK(default_t_final("t10") == 200.0);
  CHECK(default_t_final("ts5") == 2.0);
}

TEST_CASE("run writes CSV, final state and plot script") {
  const fs::path dir = scratch("run");
  IntegratorConfig cfg;
  cfg.t_final = 4.0;
  const RunReport r = run_flow(fixture("example1"), FlowKind::zero, cfg, dir);
  REQUIRE(r.outputs.size() == 3);
  for (const auto& p : r.outputs) CHECK(fs::exists(p));

  const auto lines = lines_of(dir / "trajectory.csv");
  REQUIRE(!lines.empty());
  CHECK(lines[0] == "t,d_ev,d_off,f");
  CHECK(lines.size() == r.log.size() + 1);
  // 17 significant digits: values read back exactly.
  std::istringstream row(lines.back());
  std::string cell;
  std::getline(row, cell, ',');
  CHECK(std::stod(cell) == r.log.times.back());
  std::getline(row, cell, ',');
  CHECK(std::stod(cell) == r.log.d_ev.back());

  CHECK(load_matrix((dir / "final.mat").string()) == r.log.final_state);
  CHECK(r.max_d_ev == r.log.max_d_ev());
  CHECK(r.final_d_off == r.log.d_off.back());
  CHECK(r.max_off_pattern == 0.0);
  CHECK(r.singular_flag_count == 0);
  const auto gp = lines_of(dir / "plot_doff.gp");
  CHECK(std::find(gp.begin(), gp.end(), "set logscale y") != gp.end());
  fs::remove_all(dir);
}

TEST_CASE("compare runs both flows with identical configuration") {
  const fs::path dir = scratch("compare");
  IntegratorConfig cfg;
  cfg.t_final = 2.0;
  const CompareReport c = compare_flows(fixture("t5"), cfg, dir);
  CHECK(c.zero.flow == FlowKind::zero);
  CHECK(c.db.flow == FlowKind::double_bracket);
  CHECK(c.zero.config.t_final == c.db.config.t_final);
  const auto merged = lines_of(dir / "compare.csv");
  CHECK(merged[0] == "flow,t,d_ev,d_off,f");
  CHECK(merged.size() == 1 + c.zero.log.size() + c.db.log.size());
  CHECK(merged[1].rfind("zero,", 0) == 0);
  CHECK(merged.back().rfind("db,", 0) == 0);
  CHECK(fs::exists(dir / "zero" / "trajectory.csv"));
  CHECK(fs::exists(dir / "db" / "final.mat"));
  fs::remove_all(dir);
}

TEST_CASE("scaling law of the DB flow") {
  const ScalingReport one = scaling_check(1.0, fixture("t5"), 1.0);
  CHECK(one.passed);
  CHECK(one.max_deviation == 0.0);

  Rng rng(91);
  const Fixture tri{"random", random_in_pattern(rng, SparsityPattern::tridiagonal(5)), ""};
  const ScalingReport two = scaling_check(2.0, tri, 1.0);
  CHECK(two.passed);
  CHECK(two.samples == 401);
  CHECK_THROWS_AS(scaling_check(0.0, tri, 1.0), InputError);
}

TEST_CASE("counterexamples") {
  const CounterexampleReport r = counterexamples();
  CHECK(r.shader_residual <= 1e-9);
  CHECK(r.shader_field_norm <= 1e-10);
  CHECK(r.probe.escaped);
  CHECK(r.circulant_kernel_residual <= 1e-12);
  CHECK(r.circulant_mY_zero);
  CHECK(r.passed);
}

TEST_CASE("trajectory CSV writer") {
  TrajectoryLog log;
  log.times = {0.0, 0.5};
  log.d_ev = {0.0, 1e-15};
  log.d_off = {1.0, 0.1};
  log.f = {2.0, 1.0};
  std::ostringstream out;
  write_trajectory_csv(out, log);
  CHECK(out.str() == "t,d_ev,d_off,f\n0,0,1,2\n0.5,1.0000000000000001e-15,0.10000000000000001,1\n");
}
