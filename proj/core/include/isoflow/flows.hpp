#pragma once

// Iso-spectral vector fields on Sym(n):
//
//   zero flow       X' = 2 m (A.X + m)^+ A.X (D - X)    (keeps the pattern of X)
//   double bracket  X' = [[D, X], X]
//   Toda            X' = [X, X_l - X_l^T]
//
// where A.X is the operator Y -> [[Y, X], X] and m the orthogonal projector
// onto Sym(pattern). Also: the objective f, equilibrium certification,
// the known counterexamples, and structural helpers (sigma, staircase).

#include "isoflow/integrate.hpp"
#include "isoflow/symspace.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace isoflow {

enum class FlowKind { zero, double_bracket, toda };

std::string to_string(FlowKind kind);
/// Accepts "zero", "db", "double_bracket", "toda". Throws InputError otherwise.
FlowKind parse_flow_kind(std::string_view name);

struct FlowProblem {
  FlowKind kind = FlowKind::zero;
  SymMatrix X0;
  SymMatrix D;
  SparsityPattern pattern;

  /// D defaults to diag(1..n); the pattern defaults to the nonzeros of X0.
  /// Throws DimensionError on order mismatch and InputError when a zero-flow
  /// X0 has entries outside the pattern.
  static FlowProblem make(FlowKind kind, SymMatrix X0, std::optional<SymMatrix> D = std::nullopt,
                          std::optional<SparsityPattern> pattern = std::nullopt);
};

/// (1/2) <X - D, X - D>.
double objective_f(const SymMatrix& X, const SymMatrix& D);

struct ZeroFlowValue {
  SymMatrix value;
  /// (A.X + m) had eigenvalues at or below the rank cutoff.
  bool singular_operator = false;
  double min_eigenvalue = 0.0;
};

ZeroFlowValue zero_flow_eval(const SymMatrix& X, const SymMatrix& D, const SparsityPattern& pattern,
                             double rank_tol);
SymMatrix zero_flow_field(const SymMatrix& X, const SymMatrix& D, const SparsityPattern& pattern,
                          double rank_tol);
SymMatrix zero_flow_field(const SymMatrix& X, const SymMatrix& D, const SparsityPattern& pattern);

SymMatrix double_bracket_field(const SymMatrix& X, const SymMatrix& D);

/// X_l - X_l^T for the strictly lower triangle X_l.
Matrix toda_skew(const SymMatrix& X);
SymMatrix toda_field(const SymMatrix& X);

/// Field of the given problem, ready for rk45_integrate. The zero-flow field
/// reports rank-deficient solves through FieldStatus.
VectorField make_field(const FlowProblem& problem);

struct EquilibriumReport {
  double residual = 0.0;
  SymMatrix lambda_star;
  double commute_norm = 0.0;  // ||[lambda* + D, E]||_F
  double pattern_norm = 0.0;  // ||m(lambda* + E - D)||_F
};

struct EquilibriumConditions {
  double commute_norm = 0.0;
  double pattern_norm = 0.0;
};

/// Evaluates both equilibrium conditions at a given multiplier.
EquilibriumConditions equilibrium_conditions(const SymMatrix& E, const SymMatrix& D,
                                             const SparsityPattern& pattern, const SymMatrix& lambda);

/// Minimizes ||[lambda + D, E]||^2 + ||m(lambda + E - D)||^2 over symmetric
/// lambda (minimum-norm minimizer). E is an equilibrium iff the minimum is 0.
EquilibriumReport equilibrium_residual(const SymMatrix& E, const SymMatrix& D, const SparsityPattern& pattern);

/// Threshold below which equilibrium_residual certifies an equilibrium.
double equilibrium_tolerance(const SymMatrix& E, const SymMatrix& D);

struct ShaderCounterexample {
  SymMatrix E;
  SymMatrix D;
  SymMatrix lambda;
};

/// The non-diagonal equilibrium with E = [[0,a,0],[a,0,b],[0,b,0]],
/// D = z/2 diag(E^2), lambda = -E + z E^2 - D.
/// Throws InputError for zero parameters or |a| == |b|.
ShaderCounterexample shader_counterexample(double a, double b, double z);

struct CirculantWitness {
  SymMatrix X;  // circulant(-2, 1, 0, 1), n = 4
  SymMatrix Y;  // ones on the second sub- and super-diagonal
};

CirculantWitness circulant_kernel_witness();

struct GenericityReport {
  double min_eigenvalue = 0.0;
  bool invertible = false;
};

/// Smallest eigenvalue of A.D + m for diagonal D. Throws InputError if D is not diagonal.
GenericityReport genericity_check(const SymMatrix& D, const SparsityPattern& pattern);

/// X_l + X_d + X_l^T.
SymMatrix sigma_project(const Matrix& X);

/// True iff for every i < j in the pattern, (i, j-1) and (i+1, j) are also in it.
bool staircase_check(const SparsityPattern& pattern);

}  // namespace isoflow
