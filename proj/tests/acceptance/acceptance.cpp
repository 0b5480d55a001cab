// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "isoflow/experiments.hpp"
#include "isoflow/fixtures.hpp"
#include "isoflow/flows.hpp"
#include "isoflow/parsum.hpp"
#include "isoflow/selftest.hpp"

#include "oracles.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

using namespace isoflow;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %2d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

IntegratorConfig config(double t_final) {
  IntegratorConfig cfg;
  cfg.t_final = t_final;
  return cfg;
}

// Largest |entry| of X outside the pattern of X0, over every stored snapshot.
double off_pattern(const SymMatrix& X0, const TrajectoryLog& log) {
  const Matrix mask = X0.dense().cwiseAbs().cwiseSign();
  double worst = 0.0;
  auto scan = [&](const SymMatrix& X) {
    worst = std::max(worst, (X.dense().array() * (1.0 - mask.array())).abs().maxCoeff());
  };
  for (const auto& X : log.snapshots) scan(X);
  scan(log.final_state);
  return worst;
}

double diag_vs_spectrum(const SymMatrix& X0, const SymMatrix& X) {
  Vector d = X.dense().diagonal();
  std::sort(d.begin(), d.end());
  Eigen::SelfAdjointEigenSolver<Matrix> es(X0.dense());
  return (d - es.eigenvalues()).cwiseAbs().maxCoeff();
}

std::string suites_detail(const std::vector<SuiteResult>& suites, bool& ok) {
  std::ostringstream s;
  ok = true;
  for (const auto& r : suites) {
    ok = ok && r.ok();
    s << r.name << " " << r.passed << "/" << r.total << " (worst " << r.worst_ratio << "); ";
  }
  return s.str();
}

double min_singular_ratio(const Matrix& G) {
  if (G.cols() == 0) return 1.0;
  const Vector s = Eigen::JacobiSVD<Matrix>(G).singularValues();
  return s(s.size() - 1) / s(0);
}

// Test-side cross-check of the rank law: rank !(A,B) = dim(R(A) n R(B)),
// with the intersection dimension from the oracle projector.
std::pair<int, int> oracle_rank_cases(std::uint64_t seed, int cases) {
  int agree = 0, total = 0;
  for (int k = 0; total < cases; ++k) {
    const std::uint64_t s = seed + 7919 * static_cast<std::uint64_t>(k);
    const int N = 1 + static_cast<int>(s % 21);
    const int shared = static_cast<int>((s / 21) % (N + 1));
    const int free1 = static_cast<int>((s / 7) % (N - shared + 1));
    const int free2 = std::min(N - shared - free1, static_cast<int>((s / 3) % (N + 1)));
    const Matrix S = oracle::random_matrix(s, N, N);
    Matrix G1(N, shared + free1), G2(N, shared + free2);
    G1 << S.leftCols(shared), S.middleCols(shared, free1);
    G2 << S.leftCols(shared), S.middleCols(shared + free1, free2);
    Matrix both(N, shared + free1 + free2);
    both << S.leftCols(shared + free1 + free2);
    if (min_singular_ratio(both) < 1e-3) continue;
    const Matrix A = G1 * G1.transpose(), B = G2 * G2.transpose();
    auto range_proj = [](const Matrix& G) -> Matrix {
      if (G.cols() == 0) return Matrix::Zero(G.rows(), G.rows());
      const Matrix Q = G.householderQr().householderQ() * Matrix::Identity(G.rows(), G.cols());
      return Q * Q.transpose();
    };
    const Matrix I = oracle::intersection_projector(range_proj(G1), range_proj(G2));
    const int expect = oracle::rank_of(I, 1e-6);
    const Matrix H = parallel_sum(A, B);
    const double scale = std::max({A.norm(), B.norm(), 1e-300});
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const int got = static_cast<int>((es.eigenvalues().array() > 1e-9 * scale).count());
    ++total;
    if (got == expect && expect == shared) ++agree;
  }
  return {agree, total};
}

// Test-side cross-check of the projector intersection.
std::pair<int, double> oracle_projector_cases(std::uint64_t seed, int cases) {
  int done = 0;
  double worst = 0.0;
  for (int k = 0; done < cases; ++k) {
    const std::uint64_t s = seed + 104729 * static_cast<std::uint64_t>(k);
    const int n = 2 + static_cast<int>(s % 9);
    const int shared = static_cast<int>((s / 9) % n);
    const int f1 = static_cast<int>((s / 5) % (n - shared + 1));
    const int f2 = std::min(n - shared - f1, static_cast<int>((s / 11) % (n + 1)));
    const Matrix S = oracle::random_matrix(s, n, n);
    if (min_singular_ratio(S.leftCols(shared + f1 + f2)) < 1e-3) continue;
    auto proj = [&](int first, int count) -> Matrix {
      Matrix G(n, shared + count);
      G << S.leftCols(shared), S.middleCols(first, count);
      if (G.cols() == 0) return Matrix::Zero(n, n);
      const Matrix Q = G.householderQr().householderQ() * Matrix::Identity(n, G.cols());
      return Q * Q.transpose();
    };
    const Matrix P = proj(shared, f1), Q = proj(shared + f1, f2);
    worst = std::max(worst, (intersection_projector(P, Q) - oracle::intersection_projector(P, Q)).cwiseAbs().maxCoeff());
    ++done;
  }
  return {done, worst};
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;

  // 1-3: example 1.
  {
    const Fixture fx = fixture("example1");
    auto t0 = clock::now();
    const RunReport zero = run_flow(fx, FlowKind::zero, config(60.0));
    const double tz = seconds_since(t0);
    t0 = clock::now();
    const RunReport db = run_flow(fx, FlowKind::double_bracket, config(60.0));
    const double td = seconds_since(t0);

    report(1, !zero.truncated && zero.max_d_ev <= 1e-10 && tz <= 60.0,
           fmt("example1 zero flow t=60: max d_ev %.3e (<= 1e-10), runtime %.2f s (<= 60)", zero.max_d_ev, tz));
    report(2, !db.truncated && db.max_d_ev <= 1e-10 && td <= 60.0,
           fmt("example1 DB flow t=60: max d_ev %.3e (<= 1e-10), runtime %.2f s (<= 60)", db.max_d_ev, td));
    const double dz = diag_vs_spectrum(fx.X0, zero.log.final_state);
    const double dd = diag_vs_spectrum(fx.X0, db.log.final_state);
    report(3, zero.final_d_off <= 1e-8 && db.final_d_off <= 1e-8 && dz <= 1e-8 && dd <= 1e-8,
           fmt("example1 t=60: final d_off zero %.3e, DB %.3e (<= 1e-8); sorted diag vs spectrum zero %.3e, DB %.3e "
               "(<= 1e-8)",
               zero.final_d_off, db.final_d_off, dz, dd));
  }

  // 4: example 2, pattern kept over every sample.
  {
    const Fixture fx = fixture("example2");
    IntegratorConfig cfg = config(60.0);
    cfg.keep_snapshots = true;
    const CompareReport c = compare_flows(fx, cfg);
    const double off = off_pattern(fx.X0, c.zero.log);
    report(4,
           c.zero.max_d_ev <= 1e-10 && c.db.max_d_ev <= 1e-10 && c.zero.final_d_off <= 1e-6 &&
               c.db.final_d_off <= 1e-6 && off == 0.0,
           fmt("example2 t=60: max d_ev zero %.3e, DB %.3e (<= 1e-10); final d_off zero %.3e, DB %.3e (<= 1e-6); "
               "zero-flow off-pattern max %.1e over %zu samples (== 0)",
               c.zero.max_d_ev, c.db.max_d_ev, c.zero.final_d_off, c.db.final_d_off, off, c.zero.log.size()));
  }

  // 5: which flow reaches d_off <= 1e-6 first.
  {
    const auto t0 = clock::now();
    bool ok = true;
    std::string detail;
    struct Case {
      const char* name;
      bool zero_first;
    };
    for (const Case cs : {Case{"t5", true}, Case{"t10", true}, Case{"ts5", false}, Case{"ts10", false}}) {
      const CompareReport c = compare_flows(fixture(cs.name), config(default_t_final(cs.name)));
      const auto tz = c.zero.log.first_time_d_off_below(1e-6);
      const auto td = c.db.log.first_time_d_off_below(1e-6);
      const double inf = INFINITY;
      const bool hit = tz || td;
      const bool order = cs.zero_first ? tz.value_or(inf) < td.value_or(inf) : td.value_or(inf) < tz.value_or(inf);
      ok = ok && hit && order;
      detail += fmt("%s (t=%g) zero %s DB %s; ", cs.name, default_t_final(cs.name),
                    tz ? fmt("%.3f", *tz).c_str() : "never", td ? fmt("%.3f", *td).c_str() : "never");
    }
    const double secs = seconds_since(t0);
    report(5, ok && secs <= 300.0, detail + fmt("runtime %.1f s (<= 300)", secs));
  }

  // 6: scaling law on T5.
  {
    const ScalingReport c2 = scaling_check(2.0, fixture("t5"), 1.0);
    const ScalingReport c36 = scaling_check(36.0, fixture("t5"), 1.0);
    report(6, c2.passed && c36.passed,
           fmt("t5: c=2 max dev %.3e (<= %.3e); c=36 max dev %.3e (<= %.3e); %zu samples each", c2.max_deviation,
               c2.tolerance, c36.max_deviation, c36.tolerance, c2.samples));
  }

  // 7-8: counterexamples.
  {
    const ShaderCounterexample sc = shader_counterexample(1.0, 2.0, 2.0);
    const SymMatrix diag154 = SymMatrix::diagonal((Vector(3) << 1, 5, 4).finished());
    const double d_match = (sc.D - diag154).max_abs();
    const SparsityPattern pat = SparsityPattern::nonzeros_of(sc.E);
    const double resid = equilibrium_residual(sc.E, sc.D, pat).residual;
    const double field = zero_flow_field(sc.E, sc.D, pat).frobenius_norm();
    const InstabilityProbe probe = shader_instability_probe(1e-3, 50.0);
    report(7, d_match == 0.0 && resid <= 1e-9 && field <= 1e-10 && probe.escaped,
           fmt("shader: D = diag(1,5,4) %s; equilibrium residual %.3e (<= 1e-9); ||g(E)|| %.3e (<= 1e-10); "
               "probe delta=1e-3 %s",
               d_match == 0.0 ? "yes" : "no", resid, field,
               probe.escaped ? fmt("left 10*delta ball at t=%.3f", *probe.escape_time).c_str()
                             : "stayed within 10*delta up to t=50"));

    const CounterexampleReport cx = counterexamples();
    report(8,
           cx.circulant_kernel_residual <= 1e-12 && cx.circulant_mY_zero && cx.circulant_min_eigenvalue <= 1e-12,
           fmt("circulant: ||(A.X+m)Y|| %.3e (<= 1e-12); m.Y == 0 %s; min eigenvalue %.3e (<= 1e-12)",
               cx.circulant_kernel_residual, cx.circulant_mY_zero ? "yes" : "no", cx.circulant_min_eigenvalue));
  }

  // 9: parallel-sum suite.
  {
    const auto t0 = clock::now();
    const std::uint64_t seed = kSelftestSeed;
    bool ok = false;
    std::string detail = suites_detail({suite_parallel_sum_symmetry(seed), suite_parallel_sum_psd(seed),
                                        suite_range_law(seed), suite_congruence(seed), suite_harmonic_mean(seed),
                                        suite_range_absorption(seed)},
                                       ok);
    const auto [agree, total] = oracle_rank_cases(seed, 200);
    const double secs = seconds_since(t0);
    ok = ok && agree == total && secs <= 60.0;
    report(9, ok, detail + fmt("independent rank oracle %d/%d; runtime %.2f s (<= 60)", agree, total, secs));
  }

  // 10: projector intersection and LL* maps.
  {
    bool ok = false;
    std::string detail =
        suites_detail({suite_projector_intersection(kSelftestSeed), suite_least_squares_maps(kSelftestSeed)}, ok);
    const auto [cases, worst] = oracle_projector_cases(kSelftestSeed, 100);
    ok = ok && worst <= 1e-9;
    report(10, ok, detail + fmt("independent oracle on %d pairs: max diff %.3e (<= 1e-9)", cases, worst));
  }

  // 11: flow identities.
  {
    bool ok = false;
    const std::string detail =
        suites_detail({suite_toda_identity(kSelftestSeed), suite_tridiagonal_bracket(kSelftestSeed),
                       suite_descent(kSelftestSeed), suite_staircase(kSelftestSeed)},
                      ok);
    report(11, ok, detail);
  }

  // 12: genericity.
  {
    double worst = INFINITY;
    bool ok = true;
    for (int n = 3; n <= 8; ++n)
      for (const auto& p : {SparsityPattern::full(n), SparsityPattern::tridiagonal(n)}) {
        const GenericityReport g = genericity_check(SymMatrix::ramp(n), p);
        worst = std::min(worst, g.min_eigenvalue);
        ok = ok && g.invertible && g.min_eigenvalue > 1e-10;
      }
    report(12, ok, fmt("A.D+m for D=diag(1..n), n=3..8, full and tridiagonal: smallest eigenvalue %.3e (> 1e-10)", worst));
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
