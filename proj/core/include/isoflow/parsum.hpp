#pragma once

// Parallel sums (quasi-projections) of positive semi-definite operators.
//
// For PSD A, B on an inner product space and a vector c, the quasi-projection
// equations
//
//     u - A lambda = A c
//     (A + B) lambda = (B - A) c
//
// determine u uniquely; the map c -> u is the parallel sum !(A, B) and equals
// 2 A (A+B)^+ B. Its range is Range A n Range B, its kernel Kernel A + Kernel B.
//
// Everything here works on plain dense matrices over R^N; the SymOperator
// overloads forward to them.

#include "isoflow/symspace.hpp"

namespace isoflow {

/// 2 A (A+B)^+ B. Throws NotPsdError when A or B is not PSD.
Matrix parallel_sum(const Matrix& A, const Matrix& B, double rank_tol);
Matrix parallel_sum(const Matrix& A, const Matrix& B);
SymOperator parallel_sum(const SymOperator& A, const SymOperator& B);

struct QuasiProjection {
  Vector u;
  Vector lambda;
  double residual_q1 = 0.0;  // ||u - A lambda - A c||
  double residual_q2 = 0.0;  // ||(A+B) lambda - (B-A) c||
};

/// lambda = (A+B)^+ (B-A) c, the minimum-norm multiplier; u = A (lambda + c).
QuasiProjection quasi_project(const Matrix& A, const Matrix& B, const Vector& c);

/// Second solution route: the multiplier comes from a complete orthogonal
/// decomposition least-squares solve of (A+B) lambda = (B-A) c instead of the
/// eigendecomposition pseudo-inverse. Used to cross-check uniqueness.
QuasiProjection quasi_project_lstsq(const Matrix& A, const Matrix& B, const Vector& c);

struct QuasiProjectionSolution {
  SymMatrix u;
  SymMatrix lambda;
  double residual_q1 = 0.0;
  double residual_q2 = 0.0;
};

QuasiProjectionSolution quasi_project(const SymOperator& A, const SymOperator& B, const SymMatrix& c);

/// 2 (A^-1 + B^-1)^-1 via Cholesky. Throws NumericalError for singular input.
Matrix harmonic_mean_invertible(const Matrix& A, const Matrix& B);

/// M A M^T. Throws NumericalError when M is singular.
Matrix congruence_transform(const Matrix& A, const Matrix& M);

/// Orthogonal projector onto Range L, computed as L L^+.
Matrix projector_of_map(const Matrix& L);
/// L L^T.
Matrix quasi_projector_of_map(const Matrix& L);

/// Idempotent and self-adjoint to tol (relative to max(1, max|P|)).
bool is_projector(const Matrix& P, double tol = 1e-10);

/// !(P, Q) for orthogonal projectors P and Q: the orthogonal projector onto
/// Range P n Range Q. Throws InputError when P or Q fails the projector check.
Matrix intersection_projector(const Matrix& P, const Matrix& Q);

/// Orthonormal basis (as columns) of Range P n Range Q, taken from the
/// eigenvectors of (I-P) + (I-Q) with zero eigenvalue.
Matrix subspace_intersection_basis(const Matrix& P, const Matrix& Q);

/// Number of eigenvalues of a symmetric matrix above rel_tol * max|lambda|.
int numerical_rank(const Matrix& A, double rel_tol = 1e-9);

}  // namespace isoflow
