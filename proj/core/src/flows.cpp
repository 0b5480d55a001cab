#include "isoflow/flows.hpp"

#include "isoflow/errors.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>

namespace isoflow {

namespace {

void require_same_order(const SymMatrix& a, const SymMatrix& b, const char* what) {
  if (a.n() != b.n()) throw DimensionError(std::string(what) + ": order mismatch");
}

// Coordinates of a skew matrix w.r.t. the orthonormal basis
// (E_ij - E_ji)/sqrt(2), i > j, in packed order.
Vector skew_coords(const Matrix& K) {
  const int n = static_cast<int>(K.rows());
  Vector v(tri_size(n) - n);
  for (int p = n; p < tri_size(n); ++p) {
    const auto [r, c] = packed_pair(n, p);
    v[p - n] = std::sqrt(2.0) * K(c, r);
  }
  return v;
}

}  // namespace

std::string to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::zero:
      return "zero";
    case FlowKind::double_bracket:
      return "db";
    case FlowKind::toda:
      return "toda";
  }
  return "unknown";
}

FlowKind parse_flow_kind(std::string_view name) {
  if (name == "zero") return FlowKind::zero;
  if (name == "db" || name == "double_bracket") return FlowKind::double_bracket;
  if (name == "toda") return FlowKind::toda;
  throw InputError("unknown flow '" + std::string(name) + "' (expected zero, db or toda)");
}

FlowProblem FlowProblem::make(FlowKind kind, SymMatrix X0, std::optional<SymMatrix> D,
                              std::optional<SparsityPattern> pattern) {
  FlowProblem p;
  p.kind = kind;
  const int n = X0.n();
  p.D = D ? std::move(*D) : SymMatrix::ramp(n);
  require_same_order(X0, p.D, "FlowProblem");
  p.pattern = pattern ? std::move(*pattern) : SparsityPattern::nonzeros_of(X0);
  if (p.pattern.n() != n) throw DimensionError("FlowProblem: pattern order differs from X0");
  if (kind == FlowKind::zero && !(pattern_project(p.pattern, X0) == X0)) {
    throw InputError("zero flow: X0 has nonzero entries outside the pattern");
  }
  p.X0 = std::move(X0);
  return p;
}

double objective_f(const SymMatrix& X, const SymMatrix& D) {
  require_same_order(X, D, "objective_f");
  const SymMatrix diff = X - D;
  return 0.5 * frobenius_inner(diff, diff);
}

ZeroFlowValue zero_flow_eval(const SymMatrix& X, const SymMatrix& D, const SparsityPattern& pattern,
                             double rank_tol) {
  require_same_order(X, D, "zero_flow_field");
  if (pattern.n() != X.n()) throw DimensionError("zero_flow_field: pattern order mismatch");
  const Matrix A = double_bracket_operator(X).coeffs();
  const Vector m = pattern_operator(pattern).coeffs().diagonal();
  Matrix S = A;
  S.diagonal() += m;
  const PseudoInverse inv = psd_pseudo_inverse_detail(S, rank_tol);

  const Vector rhs = A * svec(D - X);
  const Vector g = 2.0 * m.cwiseProduct(inv.pinv * rhs);

  ZeroFlowValue out;
  out.value = pattern_project(pattern, smat(g));
  out.singular_operator = inv.truncated;
  out.min_eigenvalue = inv.min_eigenvalue;
  return out;
}

SymMatrix zero_flow_field(const SymMatrix& X, const SymMatrix& D, const SparsityPattern& pattern,
                          double rank_tol) {
  return zero_flow_eval(X, D, pattern, rank_tol).value;
}

SymMatrix zero_flow_field(const SymMatrix& X, const SymMatrix& D, const SparsityPattern& pattern) {
  return zero_flow_field(X, D, pattern, default_rank_tol(tri_size(X.n())));
}

SymMatrix double_bracket_field(const SymMatrix& X, const SymMatrix& D) {
  require_same_order(X, D, "double_bracket_field");
  const Matrix Xd = X.dense();
  const Matrix K = commutator(D.dense(), Xd);
  return symmetric_part(commutator(K, Xd));
}

Matrix toda_skew(const SymMatrix& X) {
  const Matrix Xd = X.dense();
  const Matrix L = Xd.triangularView<Eigen::StrictlyLower>();
  return L - L.transpose();
}

SymMatrix toda_field(const SymMatrix& X) { return symmetric_part(commutator(X.dense(), toda_skew(X))); }

VectorField make_field(const FlowProblem& problem) {
  switch (problem.kind) {
    case FlowKind::zero: {
      const double tol = default_rank_tol(tri_size(problem.X0.n()));
      return [D = problem.D, pattern = problem.pattern, tol](const SymMatrix& X, FieldStatus& status) {
        ZeroFlowValue v = zero_flow_eval(X, D, pattern, tol);
        status.singular = v.singular_operator;
        return std::move(v.value);
      };
    }
    case FlowKind::double_bracket:
      return plain_field([D = problem.D](const SymMatrix& X) { return double_bracket_field(X, D); });
    case FlowKind::toda:
      return plain_field([](const SymMatrix& X) { return toda_field(X); });
  }
  throw InputError("unknown flow kind");
}

EquilibriumConditions equilibrium_conditions(const SymMatrix& E, const SymMatrix& D,
                                             const SparsityPattern& pattern, const SymMatrix& lambda) {
  require_same_order(E, D, "equilibrium_conditions");
  require_same_order(E, lambda, "equilibrium_conditions");
  EquilibriumConditions c;
  c.commute_norm = commutator((lambda + D).dense(), E.dense()).norm();
  c.pattern_norm = pattern_project(pattern, lambda + E - D).frobenius_norm();
  return c;
}

EquilibriumReport equilibrium_residual(const SymMatrix& E, const SymMatrix& D, const SparsityPattern& pattern) {
  require_same_order(E, D, "equilibrium_residual");
  const int n = E.n();
  const int N = tri_size(n);
  const int K = N - n;
  const Matrix Ed = E.dense();
  const Vector mdiag = pattern_operator(pattern).coeffs().diagonal();

  // Residual r(lambda) = M svec(lambda) + b with the skew part of [lambda + D, E]
  // stacked over svec(m(lambda + E - D)); both blocks are isometric coordinates.
  Matrix M = Matrix::Zero(K + N, N);
  Vector e = Vector::Zero(N);
  for (int p = 0; p < N; ++p) {
    e[p] = 1.0;
    M.col(p).head(K) = skew_coords(commutator(smat(e).dense(), Ed));
    M(K + p, p) = mdiag[p];
    e[p] = 0.0;
  }
  Vector b(K + N);
  b.head(K) = skew_coords(commutator(D.dense(), Ed));
  b.tail(N) = mdiag.cwiseProduct(svec(E - D));

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  cod.setThreshold(1e-12);
  const Vector lambda = cod.solve(-b);

  EquilibriumReport report;
  report.lambda_star = smat(lambda);
  report.residual = (M * lambda + b).norm();
  const auto c = equilibrium_conditions(E, D, pattern, report.lambda_star);
  report.commute_norm = c.commute_norm;
  report.pattern_norm = c.pattern_norm;
  return report;
}

double equilibrium_tolerance(const SymMatrix& E, const SymMatrix& D) {
  return 1e-9 * (1.0 + D.frobenius_norm() + E.frobenius_norm());
}

ShaderCounterexample shader_counterexample(double a, double b, double z) {
  if (a == 0.0 || b == 0.0 || z == 0.0) {
    throw InputError("shader counterexample: a, b and z must be nonzero");
  }
  if (std::abs(a) == std::abs(b)) {
    throw InputError("shader counterexample: |a| == |b| gives repeated entries in D");
  }
  SymMatrix E(3);
  E.set(0, 1, a);
  E.set(1, 2, b);
  const Matrix Ed = E.dense();
  const SymMatrix E2 = symmetric_part(Ed * Ed);
  ShaderCounterexample out;
  out.D = 0.5 * z * E2.diag_part();
  out.lambda = -E + z * E2 - out.D;
  out.E = std::move(E);
  return out;
}

CirculantWitness circulant_kernel_witness() {
  CirculantWitness w{SymMatrix(4), SymMatrix(4)};
  for (int i = 0; i < 4; ++i) {
    w.X.set(i, i, -2.0);
    w.X.set(i, (i + 1) % 4, 1.0);
    w.Y.set(i, (i + 2) % 4, 1.0);
  }
  return w;
}

GenericityReport genericity_check(const SymMatrix& D, const SparsityPattern& pattern) {
  if (!D.is_diagonal()) throw InputError("genericity_check: D must be diagonal");
  if (pattern.n() != D.n()) throw DimensionError("genericity_check: pattern order mismatch");
  const Matrix S = (double_bracket_operator(D) + pattern_operator(pattern)).coeffs();
  const Vector ev = sym_eigen(S).values;
  GenericityReport r;
  r.min_eigenvalue = ev[0];
  const double threshold = S.rows() * std::numeric_limits<double>::epsilon() * ev[ev.size() - 1];
  r.invertible = r.min_eigenvalue > threshold;
  return r;
}

SymMatrix sigma_project(const Matrix& X) { return SymMatrix::from_lower(X); }

bool staircase_check(const SparsityPattern& pattern) {
  const int n = pattern.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (pattern.contains(i, j) && (!pattern.contains(i, j - 1) || !pattern.contains(i + 1, j))) return false;
  return true;
}

}  // namespace isoflow
