#include "isoflow/parsum.hpp"

#include "isoflow/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isoflow {

namespace {

void require_square_pair(const Matrix& A, const Matrix& B, const char* what) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows()) {
    throw DimensionError(std::string(what) + ": operands must be square of the same size");
  }
}

void require_psd(const Matrix& A, const char* name) {
  if (A.size() == 0) return;
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw NotPsdError(std::string(name) + " is not self-adjoint");
  }
  const Vector ev = sym_eigen(A).values;
  const double mag = ev.cwiseAbs().maxCoeff();
  if (ev[0] < -1e-8 * mag) {
    std::ostringstream msg;
    msg << name << " is not positive semi-definite (eigenvalue " << ev[0] << ")";
    throw NotPsdError(msg.str());
  }
}

QuasiProjection finish(const Matrix& A, const Matrix& B, const Vector& c, Vector lambda) {
  QuasiProjection out;
  out.u = A * (lambda + c);
  out.residual_q1 = (out.u - A * lambda - A * c).norm();
  out.residual_q2 = ((A + B) * lambda - (B - A) * c).norm();
  out.lambda = std::move(lambda);
  return out;
}

}  // namespace

Matrix parallel_sum(const Matrix& A, const Matrix& B, double rank_tol) {
  require_square_pair(A, B, "parallel_sum");
  require_psd(A, "A");
  require_psd(B, "B");
  const Eigen::Index N = A.rows();
  if (N == 0) return Matrix(0, 0);

  // Same value as 2 A (A+B)^+ B, evaluated as a Gram matrix. With S = A + B
  // and T = S^{+/2} A S^{+/2} (0 <= T <= I on Range S), the product equals
  // 2 S^{1/2} T (I - T) S^{1/2}, so clamping the spectrum of T keeps the
  // result PSD even when the ranges meet only at zero.
  const auto [s, V] = sym_eigen(Matrix(A + B));
  const double threshold = rank_tol * std::max(1.0, s[N - 1]);
  Eigen::Index first = 0;
  while (first < N && s[first] <= threshold) ++first;
  const Eigen::Index r = N - first;
  if (r == 0) return Matrix::Zero(N, N);

  const Matrix Vr = V.rightCols(r);
  const Vector root = s.tail(r).cwiseSqrt();
  const Matrix W = Vr * root.cwiseInverse().asDiagonal();
  Matrix T = W.transpose() * A * W;
  T = 0.5 * (T + T.transpose()).eval();
  const auto [t, U] = sym_eigen(T);
  Vector w(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    const double tk = std::clamp(t[k], 0.0, 1.0);
    w[k] = std::sqrt(2.0 * tk * (1.0 - tk));
  }
  const Matrix G = Vr * root.asDiagonal() * U * w.asDiagonal();
  Matrix H = G * G.transpose();
  return 0.5 * (H + H.transpose());
}

Matrix parallel_sum(const Matrix& A, const Matrix& B) {
  return parallel_sum(A, B, default_rank_tol(static_cast<int>(A.rows())));
}

SymOperator parallel_sum(const SymOperator& A, const SymOperator& B) {
  if (A.n() != B.n()) throw DimensionError("parallel_sum: operator orders differ");
  return {A.n(), parallel_sum(A.coeffs(), B.coeffs())};
}

QuasiProjection quasi_project(const Matrix& A, const Matrix& B, const Vector& c) {
  require_square_pair(A, B, "quasi_project");
  if (c.size() != A.rows()) throw DimensionError("quasi_project: vector length mismatch");
  require_psd(A, "A");
  require_psd(B, "B");
  Vector lambda = psd_pseudo_inverse(A + B) * ((B - A) * c);
  return finish(A, B, c, std::move(lambda));
}

QuasiProjection quasi_project_lstsq(const Matrix& A, const Matrix& B, const Vector& c) {
  require_square_pair(A, B, "quasi_project_lstsq");
  if (c.size() != A.rows()) throw DimensionError("quasi_project_lstsq: vector length mismatch");
  require_psd(A, "A");
  require_psd(B, "B");
  const Matrix S = A + B;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(S);
  cod.setThreshold(1e-10);  // relative to the largest pivot
  Vector lambda = cod.solve((B - A) * c);
  return finish(A, B, c, std::move(lambda));
}

QuasiProjectionSolution quasi_project(const SymOperator& A, const SymOperator& B, const SymMatrix& c) {
  if (A.n() != B.n() || A.n() != c.n()) throw DimensionError("quasi_project: order mismatch");
  QuasiProjection q = quasi_project(A.coeffs(), B.coeffs(), svec(c));
  return {smat(q.u), smat(q.lambda), q.residual_q1, q.residual_q2};
}

Matrix harmonic_mean_invertible(const Matrix& A, const Matrix& B) {
  require_square_pair(A, B, "harmonic_mean_invertible");
  const Eigen::Index N = A.rows();
  const Matrix I = Matrix::Identity(N, N);
  auto inverse = [&](const Matrix& M, const char* name) {
    Eigen::LLT<Matrix> llt(M);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-14) {
      throw NumericalError(std::string(name) + " is singular or not positive definite");
    }
    return Matrix(llt.solve(I));
  };
  const Matrix sum = inverse(A, "A") + inverse(B, "B");
  return 2.0 * inverse(sum, "A^-1 + B^-1");
}

Matrix congruence_transform(const Matrix& A, const Matrix& M) {
  if (M.rows() != M.cols() || M.rows() != A.rows() || A.rows() != A.cols()) {
    throw DimensionError("congruence_transform: size mismatch");
  }
  Eigen::FullPivLU<Matrix> lu(M);
  if (!lu.isInvertible()) throw NumericalError("congruence_transform: M is singular");
  return M * A * M.transpose();
}

Matrix projector_of_map(const Matrix& L) {
  // L^+ = (L^T L)^+ L^T holds for every L, including rank-deficient ones.
  const Matrix gram = L.transpose() * L;
  const Matrix P = L * psd_pseudo_inverse(gram) * L.transpose();
  return 0.5 * (P + P.transpose());
}

Matrix quasi_projector_of_map(const Matrix& L) { return L * L.transpose(); }

bool is_projector(const Matrix& P, double tol) {
  if (P.rows() != P.cols()) return false;
  if (P.size() == 0) return true;
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  const bool self_adjoint = (P - P.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
  const bool idempotent = (P * P - P).cwiseAbs().maxCoeff() <= tol * scale;
  return self_adjoint && idempotent;
}

Matrix intersection_projector(const Matrix& P, const Matrix& Q) {
  require_square_pair(P, Q, "intersection_projector");
  if (!is_projector(P)) throw InputError("intersection_projector: P is not an orthogonal projector");
  if (!is_projector(Q)) throw InputError("intersection_projector: Q is not an orthogonal projector");
  return parallel_sum(P, Q);
}

Matrix subspace_intersection_basis(const Matrix& P, const Matrix& Q) {
  require_square_pair(P, Q, "subspace_intersection_basis");
  if (!is_projector(P) || !is_projector(Q)) {
    throw InputError("subspace_intersection_basis: inputs must be orthogonal projectors");
  }
  // x is in both ranges iff x^T ((I-P) + (I-Q)) x = 0 for projectors.
  const Eigen::Index N = P.rows();
  const Matrix I = Matrix::Identity(N, N);
  const EigenDecomposition eig = sym_eigen(Matrix((I - P) + (I - Q)));
  Eigen::Index dim = 0;
  while (dim < N && eig.values[dim] < 1e-8) ++dim;
  return eig.vectors.leftCols(dim);
}

int numerical_rank(const Matrix& A, double rel_tol) {
  if (A.size() == 0) return 0;
  const Vector ev = sym_eigen(A).values;
  const double mag = ev.cwiseAbs().maxCoeff();
  if (mag == 0.0) return 0;
  return static_cast<int>((ev.array().abs() > rel_tol * mag).count());
}

}  // namespace isoflow
