#include "isoflow/selftest.hpp"

#include "isoflow/flows.hpp"
#include "isoflow/integrate.hpp"
#include "isoflow/parsum.hpp"
#include "isoflow/random.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace isoflow {

namespace {

class Tally {
 public:
  explicit Tally(std::string name) { r_.name = std::move(name); }

  void check(double err, double threshold) {
    ++r_.total;
    const double ratio = threshold > 0.0 ? err / threshold : (err > 0.0 ? INFINITY : 0.0);
    if (std::isfinite(ratio) && ratio <= 1.0) ++r_.passed;
    r_.worst_ratio = std::max(r_.worst_ratio, std::isnan(ratio) ? INFINITY : ratio);
  }
  void check_equal(int a, int b) { check(a == b ? 0.0 : 2.0, 1.0); }

  SuiteResult result() const { return r_; }

 private:
  SuiteResult r_;
};

struct PsdPair {
  Matrix A;
  Matrix B;
};

// Ratio of the k-th to the largest singular value.
double singular_ratio(const Matrix& G, int k) {
  if (k == 0) return 1.0;
  const Vector sv = Eigen::JacobiSVD<Matrix>(G).singularValues();
  return sv[k - 1] / sv[0];
}

// A = G1 G1^T, B = G2 G2^T with a block of columns shared through a random
// orthogonal mixing, so range intersections are nontrivial more often than not.
// Draws where G1, G2 or [G1 G2] have condition number above 1e3 on their
// range are redrawn: there the parallel sum amplifies rounding by cond^2.
PsdPair random_psd_pair(Rng& rng, int max_N, bool full_rank) {
  for (;;) {
    const int N = random_int(rng, 1, max_N);
    const int r1 = full_rank ? N : random_int(rng, 1, N);
    const int r2 = full_rank ? N : random_int(rng, 1, N);
    const int shared = full_rank ? 0 : random_int(rng, 0, std::min(r1, r2));
    const Matrix S = random_gaussian(rng, N, shared);
    Matrix G1(N, r1), G2(N, r2);
    G1 << S, random_gaussian(rng, N, r1 - shared);
    G2 << S * random_orthogonal(rng, shared), random_gaussian(rng, N, r2 - shared);
    Matrix both(N, r1 + r2);
    both << G1, G2;
    if (singular_ratio(G1, r1) < 1e-3 || singular_ratio(G2, r2) < 1e-3 ||
        singular_ratio(both, std::min(N, r1 + r2 - shared)) < 1e-3)
      continue;
    Matrix A = G1 * G1.transpose();
    Matrix B = G2 * G2.transpose();
    return {0.5 * (A + A.transpose()), 0.5 * (B + B.transpose())};
  }
}

// Q1 diag(e^u) Q2^T with u uniform in [-1, 1]: condition number at most e^2.
Matrix random_well_conditioned(Rng& rng, int N) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector d(N);
  for (int i = 0; i < N; ++i) d[i] = std::exp(u(rng));
  return random_orthogonal(rng, N) * d.asDiagonal() * random_orthogonal(rng, N).transpose();
}

Matrix orthonormal_basis(const Matrix& G) {
  if (G.cols() == 0) return Matrix(G.rows(), 0);
  const Eigen::HouseholderQR<Matrix> qr(G);
  return Matrix(qr.householderQ()).leftCols(G.cols());
}

Matrix range_projector(const Matrix& A) {
  const EigenDecomposition e = sym_eigen(A);
  const double tol = 1e-10 * e.values.cwiseAbs().maxCoeff();
  Matrix P = Matrix::Zero(A.rows(), A.cols());
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    if (e.values[k] > tol) P += e.vectors.col(k) * e.vectors.col(k).transpose();
  return P;
}

Matrix kernel_basis(const Matrix& A) {
  const EigenDecomposition e = sym_eigen(A);
  const double tol = 1e-10 * e.values.cwiseAbs().maxCoeff();
  Eigen::Index k = 0;
  while (k < e.values.size() && e.values[k] <= tol) ++k;
  return e.vectors.leftCols(k);
}

SparsityPattern random_pattern(Rng& rng, int n) {
  std::vector<std::pair<int, int>> entries;
  std::bernoulli_distribution coin(0.5);
  for (int i = 1; i <= n; ++i) {
    entries.emplace_back(i, i);
    for (int j = i + 1; j <= n; ++j) {
      if (coin(rng)) {
        entries.emplace_back(i, j);
        entries.emplace_back(j, i);
      }
    }
  }
  return {n, entries};
}

}  // namespace

SuiteResult suite_parallel_sum_symmetry(std::uint64_t seed, int cases) {
  Rng rng(seed);
  Tally t("parallel-sum formula symmetry");
  for (int k = 0; k < cases; ++k) {
    const auto [A, B] = random_psd_pair(rng, 21, false);
    const Matrix pinv = psd_pseudo_inverse(Matrix(A + B));
    const Matrix left = 2.0 * A * pinv * B;
    const Matrix right = 2.0 * B * pinv * A;
    t.check((left - right).norm(), 1e-9 * (1.0 + A.norm() * B.norm()));
  }
  return t.result();
}

SuiteResult suite_parallel_sum_psd(std::uint64_t seed, int cases) {
  Rng rng(seed + 1);
  Tally t("parallel-sum positive semi-definite");
  for (int k = 0; k < cases; ++k) {
    const auto [A, B] = random_psd_pair(rng, 21, false);
    const Matrix H = parallel_sum(A, B);
    const Vector ev = sym_eigen(Matrix(0.5 * (H + H.transpose()))).values;
    const double lmax = std::max(0.0, ev[ev.size() - 1]);
    t.check(std::max(0.0, -ev[0]), 1e-9 * std::max(lmax, 1e-300));
  }
  return t.result();
}

SuiteResult suite_range_law(std::uint64_t seed, int cases) {
  Rng rng(seed + 2);
  Tally t("parallel-sum range = intersection of ranges");
  for (int k = 0; k < cases; ++k) {
    const auto [A, B] = random_psd_pair(rng, 21, false);
    const Matrix H = parallel_sum(A, B);
    const int dim = static_cast<int>(subspace_intersection_basis(range_projector(A), range_projector(B)).cols());
    // Rank is counted against the input scale, not the (possibly zero) scale of H.
    const Vector ev = sym_eigen(H).values;
    const double tol = 1e-9 * std::max(A.norm(), B.norm());
    t.check_equal(static_cast<int>((ev.array() > tol).count()), dim);
  }
  return t.result();
}

SuiteResult suite_kernel_law(std::uint64_t seed, int cases) {
  Rng rng(seed + 3);
  Tally t("parallel-sum kernel contains Kernel A + Kernel B");
  for (int k = 0; k < cases; ++k) {
    const auto [A, B] = random_psd_pair(rng, 21, false);
    const Matrix H = parallel_sum(A, B);
    const Matrix KA = kernel_basis(A);
    const Matrix KB = kernel_basis(B);
    const Vector x = KA * random_gaussian(rng, static_cast<int>(KA.cols()), 1);
    const Vector y = KB * random_gaussian(rng, static_cast<int>(KB.cols()), 1);
    const Vector z = x + y;
    t.check((H * z).norm(), 1e-9 * (1.0 + H.norm()) * std::max(1.0, z.norm()));
  }
  return t.result();
}

SuiteResult suite_congruence(std::uint64_t seed, int cases) {
  Rng rng(seed + 4);
  Tally t("congruence M !(A,B) M^T = !(MAM^T, MBM^T)");
  for (int k = 0; k < cases; ++k) {
    const auto [A, B] = random_psd_pair(rng, 21, false);
    const int N = static_cast<int>(A.rows());
    const Matrix M = random_well_conditioned(rng, N);
    const Matrix lhs = congruence_transform(parallel_sum(A, B), M);
    const Matrix MA = congruence_transform(A, M);
    const Matrix MB = congruence_transform(B, M);
    const Matrix rhs = parallel_sum(Matrix(0.5 * (MA + MA.transpose())), Matrix(0.5 * (MB + MB.transpose())));
    // Scaled by the inputs: lhs itself vanishes whenever the ranges meet only at 0.
    t.check((lhs - rhs).norm(), 1e-9 * (1.0 + MA.norm() + MB.norm()));
  }
  return t.result();
}

SuiteResult suite_harmonic_mean(std::uint64_t seed, int cases) {
  Rng rng(seed + 5);
  Tally t("harmonic mean equals parallel sum on SPD pairs");
  for (int k = 0; k < cases; ++k) {
    auto [A, B] = random_psd_pair(rng, 21, true);
    const int N = static_cast<int>(A.rows());
    A += 0.1 * Matrix::Identity(N, N);
    B += 0.1 * Matrix::Identity(N, N);
    const Matrix H = harmonic_mean_invertible(A, B);
    t.check((parallel_sum(A, B) - H).norm(), 1e-10 * (1.0 + H.norm()));
  }
  return t.result();
}

SuiteResult suite_range_absorption(std::uint64_t seed, int cases) {
  Rng rng(seed + 6);
  Tally t("A = A (A+B)(A+B)^+");
  for (int k = 0; k < cases; ++k) {
    const auto [A, B] = random_psd_pair(rng, 21, false);
    const Matrix S = A + B;
    t.check((A - A * S * psd_pseudo_inverse(S)).norm(), 1e-9 * (1.0 + A.norm()));
  }
  return t.result();
}

SuiteResult suite_kernel_sum(std::uint64_t seed, int cases) {
  Rng rng(seed + 7);
  Tally t("Kernel(A+B) = Kernel A n Kernel B");
  for (int k = 0; k < cases; ++k) {
    const auto [A, B] = random_psd_pair(rng, 12, false);
    const int N = static_cast<int>(A.rows());
    const Matrix I = Matrix::Identity(N, N);
    const Matrix KS = kernel_basis(Matrix(A + B));
    const Matrix common = subspace_intersection_basis(I - range_projector(A), I - range_projector(B));
    t.check_equal(static_cast<int>(KS.cols()), static_cast<int>(common.cols()));
    const double scale = 1e-9 * (1.0 + A.norm() + B.norm());
    if (KS.cols() > 0) t.check(std::max((A * KS).norm(), (B * KS).norm()), scale);
  }
  return t.result();
}

SuiteResult suite_uniqueness(std::uint64_t seed, int cases) {
  Rng rng(seed + 8);
  Tally t("quasi-projection uniqueness across solution routes");
  for (int k = 0; k < cases; ++k) {
    const auto [A, B] = random_psd_pair(rng, 21, false);
    const Vector c = random_gaussian(rng, static_cast<int>(A.rows()), 1);
    const QuasiProjection p = quasi_project(A, B, c);
    const QuasiProjection q = quasi_project_lstsq(A, B, c);
    const double scale = 1e-9 * (1.0 + (A.norm() + B.norm()) * c.norm());
    t.check((p.u - q.u).norm(), scale);
    t.check((A * (p.lambda - q.lambda)).norm(), scale);
    t.check((B * (p.lambda - q.lambda)).norm(), scale);
    t.check((p.u - parallel_sum(A, B) * c).norm(), scale);
  }
  return t.result();
}

SuiteResult suite_projector_intersection(std::uint64_t seed, int cases) {
  Rng rng(seed + 9);
  Tally t("!(P,Q) is the projector onto Range P n Range Q");
  for (int k = 0; k < cases; ++k) {
    const int N = random_int(rng, 2, 16);
    const int shared = random_int(rng, 0, N / 2);
    const int extra1 = random_int(rng, 0, N - shared);
    const int extra2 = random_int(rng, 0, N - shared);
    const Matrix S = random_gaussian(rng, N, shared);
    Matrix G1(N, shared + extra1), G2(N, shared + extra2);
    G1 << S, random_gaussian(rng, N, extra1);
    G2 << S, random_gaussian(rng, N, extra2);
    Matrix both(N, shared + extra1 + extra2);
    both << G1, G2.rightCols(extra2);
    if (singular_ratio(both, std::min(N, shared + extra1 + extra2)) < 1e-3) {  // nearly touching subspaces
      --k;
      continue;
    }
    const Matrix U1 = orthonormal_basis(G1);
    const Matrix U2 = orthonormal_basis(G2);
    const Matrix P = U1 * U1.transpose();
    const Matrix Q = U2 * U2.transpose();

    const Matrix H = intersection_projector(P, Q);
    const Matrix basis = subspace_intersection_basis(P, Q);
    const Matrix oracle = basis * basis.transpose();
    t.check((H * H - H).norm(), 1e-9);
    t.check((H - H.transpose()).norm(), 1e-9);
    t.check((H - oracle).norm(), 1e-9);
  }
  return t.result();
}

SuiteResult suite_least_squares_maps(std::uint64_t seed, int cases) {
  Rng rng(seed + 10);
  Tally t("LL* and LL^+ share rank and kernel");
  for (int k = 0; k < cases; ++k) {
    const int N = random_int(rng, 1, 15);
    const int cols = random_int(rng, 1, 15);
    const int r = random_int(rng, 1, std::min(N, cols));
    const Matrix L = random_gaussian(rng, N, r) * random_gaussian(rng, r, cols);
    if (singular_ratio(L, r) < 1e-3) {  // a rank decision is meaningless here
      --k;
      continue;
    }
    const Matrix P = projector_of_map(L);
    const Matrix Q = quasi_projector_of_map(L);
    t.check_equal(numerical_rank(P, 1e-9), numerical_rank(Q, 1e-9));
    t.check_equal(numerical_rank(P, 1e-9), r);
    const double scale = 1e-9 * (1.0 + Q.norm());
    const Matrix KP = kernel_basis(P);
    const Matrix KQ = kernel_basis(Q);
    t.check((Q * KP).norm(), scale);
    t.check((P * KQ).norm(), 1e-9);
    t.check((Q - P * Q).norm(), scale);
  }
  return t.result();
}

SuiteResult suite_toda_identity(std::uint64_t seed, int cases) {
  Rng rng(seed + 11);
  Tally t("[X, X_l - X_l^T] = -[X, X_d + 2 X_l^T]");
  for (int k = 0; k < cases; ++k) {
    const SymMatrix X = random_symmetric(rng, random_int(rng, 1, 10));
    const Matrix Xd = X.dense();
    const Matrix L = Xd.triangularView<Eigen::StrictlyLower>();
    const Matrix diag = Xd.diagonal().asDiagonal();
    const Matrix lhs = commutator(Xd, L - L.transpose());
    const Matrix rhs = -commutator(Xd, diag + 2.0 * L.transpose());
    t.check((lhs - rhs).norm(), 1e-12 * (1.0 + Xd.squaredNorm()));
  }
  return t.result();
}

SuiteResult suite_tridiagonal_bracket(std::uint64_t seed, int cases) {
  Rng rng(seed + 12);
  Tally t("[D, X] = X_l - X_l^T for tridiagonal X, D = diag(1..n)");
  for (int k = 0; k < cases; ++k) {
    const int n = random_int(rng, 1, 12);
    const SymMatrix X = random_in_pattern(rng, SparsityPattern::tridiagonal(n));
    const Matrix bracket = commutator(SymMatrix::ramp(n).dense(), X.dense());
    t.check((bracket - toda_skew(X)).cwiseAbs().maxCoeff(), 1e-14);
  }
  return t.result();
}

SuiteResult suite_descent(std::uint64_t seed, int cases) {
  Rng rng(seed + 13);
  Tally t("descent of f along zero and DB fields");
  for (int k = 0; k < cases; ++k) {
    const int n = random_int(rng, 2, 7);
    const SparsityPattern pattern = random_pattern(rng, n);
    const SymMatrix X = random_in_pattern(rng, pattern);
    const SymMatrix D = SymMatrix::ramp(n);
    const SymMatrix grad = X - D;

    const SymMatrix g = zero_flow_field(X, D, pattern);
    t.check(std::max(0.0, frobenius_inner(grad, g)), 1e-10 * (1.0 + grad.frobenius_norm() * g.frobenius_norm()));

    const SymMatrix h = double_bracket_field(X, D);
    const double bracket2 = commutator(D.dense(), X.dense()).squaredNorm();
    const double scale = 1e-10 * (1.0 + grad.frobenius_norm() * h.frobenius_norm() + bracket2);
    t.check(std::abs(frobenius_inner(grad, h) + bracket2), scale);
    t.check(std::max(0.0, frobenius_inner(grad, h)), scale);
  }
  return t.result();
}

SparsityPattern staircase_example() {
  const int reach[6] = {3, 3, 5, 6, 6, 6};
  std::vector<std::pair<int, int>> entries;
  for (int i = 1; i <= 6; ++i) {
    for (int j = i; j <= reach[i - 1]; ++j) {
      entries.emplace_back(i, j);
      entries.emplace_back(j, i);
    }
  }
  return {6, entries};
}

SuiteResult suite_staircase(std::uint64_t seed) {
  Rng rng(seed + 14);
  Tally t("Toda flow keeps staircase patterns on [0, 10]");
  for (const SparsityPattern& pattern : {SparsityPattern::tridiagonal(6), staircase_example()}) {
    const SymMatrix X0 = random_in_pattern(rng, pattern);
    double worst = 0.0;
    const VectorField field = plain_field([&](const SymMatrix& X) {
      worst = std::max(worst, (X - pattern_project(pattern, X)).max_abs());
      return toda_field(X);
    });
    IntegratorConfig cfg;
    cfg.t_final = 10.0;
    const TrajectoryLog log = rk45_integrate(field, X0, cfg);
    worst = std::max(worst, (log.final_state - pattern_project(pattern, log.final_state)).max_abs());
    t.check(staircase_check(pattern) ? 0.0 : 2.0, 1.0);
    t.check(worst, 1e-10);
  }
  return t.result();
}

SuiteResult suite_genericity() {
  Tally t("A.D + m invertible for D = diag(1..n)");
  for (int n = 3; n <= 8; ++n) {
    const SymMatrix D = SymMatrix::ramp(n);
    for (const auto& pattern : {SparsityPattern::full(n), SparsityPattern::tridiagonal(n)}) {
      const GenericityReport g = genericity_check(D, pattern);
      t.check(g.invertible && g.min_eigenvalue > 1e-10 ? 0.0 : 2.0, 1.0);
    }
  }
  return t.result();
}

std::vector<SuiteResult> run_selftest(std::uint64_t seed) {
  return {
      suite_parallel_sum_symmetry(seed),
      suite_parallel_sum_psd(seed),
      suite_range_law(seed),
      suite_kernel_law(seed),
      suite_congruence(seed),
      suite_harmonic_mean(seed),
      suite_range_absorption(seed),
      suite_kernel_sum(seed),
      suite_uniqueness(seed),
      suite_projector_intersection(seed),
      suite_least_squares_maps(seed),
      suite_toda_identity(seed),
      suite_tridiagonal_bracket(seed),
      suite_descent(seed),
      suite_staircase(seed),
      suite_genericity(),
  };
}

}  // namespace isoflow
