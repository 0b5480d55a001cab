#pragma once

// Test-side reference computations. Nothing here calls into the library's
// own solvers: null spaces come from SVD, operators are assembled from an
// explicitly written basis, and checksums are plain FNV-1a.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Orthonormal basis of Sym(n) in the order (11),(22),...,(nn), then the first
// off-diagonal (12),(23),..., then (13),(24),..., i.e. by distance from the diagonal.
inline std::vector<Matrix> sym_basis(int n) {
  std::vector<Matrix> basis;
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i + k < n; ++i) {
      Matrix B = Matrix::Zero(n, n);
      if (k == 0) {
        B(i, i) = 1.0;
      } else {
        B(i + k, i) = B(i, i + k) = 1.0 / std::sqrt(2.0);
      }
      basis.push_back(B);
    }
  }
  return basis;
}

inline Vector coords(const Matrix& X) {
  const auto basis = sym_basis(static_cast<int>(X.rows()));
  Vector v(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) v[static_cast<Eigen::Index>(k)] = (basis[k].cwiseProduct(X)).sum();
  return v;
}

inline Matrix from_coords(int n, const Vector& v) {
  const auto basis = sym_basis(n);
  Matrix X = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < basis.size(); ++k) X += v[static_cast<Eigen::Index>(k)] * basis[k];
  return X;
}

// Matrix of a linear map on Sym(n), column k = coords(action(basis_k)).
inline Matrix operator_matrix(int n, const std::function<Matrix(const Matrix&)>& action) {
  const auto basis = sym_basis(n);
  const auto N = static_cast<Eigen::Index>(basis.size());
  Matrix M(N, N);
  for (Eigen::Index k = 0; k < N; ++k) M.col(k) = coords(action(basis[static_cast<std::size_t>(k)]));
  return M;
}

inline Matrix bracket(const Matrix& X, const Matrix& Y) { return X * Y - Y * X; }

// Orthonormal basis of the null space, by SVD with a relative cutoff.
// With abs_tol > 0 the cutoff is absolute instead.
inline Matrix null_space(const Matrix& M, double rel_tol = 1e-10, double abs_tol = 0.0) {
  const Eigen::Index cols = M.cols();
  if (cols == 0) return Matrix(0, 0);
  if (M.rows() == 0) return Matrix::Identity(cols, cols);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const Vector s = svd.singularValues();
  const double top = s.size() ? s[0] : 0.0;
  const double cut = abs_tol > 0.0 ? abs_tol : rel_tol * top;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s[k] > cut && top > 0.0) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}

inline int rank_of(const Matrix& M, double rel_tol = 1e-10) {
  return static_cast<int>(M.cols() - null_space(M, rel_tol).cols());
}

// Projector onto Range P n Range Q: null space of [I - P; I - Q] stacked,
// orthonormalized by Householder QR (Gram-Schmidt equivalent). Projector
// entries are O(1), so the cutoff is absolute.
inline Matrix intersection_projector(const Matrix& P, const Matrix& Q) {
  const Eigen::Index N = P.rows();
  Matrix stacked(2 * N, N);
  stacked << Matrix::Identity(N, N) - P, Matrix::Identity(N, N) - Q;
  const Matrix K = null_space(stacked, 0.0, 1e-8);
  if (K.cols() == 0) return Matrix::Zero(N, N);
  Eigen::HouseholderQR<Matrix> qr(K);
  const Matrix U = Matrix(qr.householderQ()).leftCols(K.cols());
  return U * U.transpose();
}

// Distance from G to span{[K, X] : K skew}, built from the elementary skew basis.
inline double tangent_residual(const Matrix& X, const Matrix& G) {
  const Eigen::Index n = X.rows();
  std::vector<Vector> cols;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Matrix K = Matrix::Zero(n, n);
      K(i, j) = 1.0;
      K(j, i) = -1.0;
      const Matrix T = bracket(K, X);
      cols.push_back(Eigen::Map<const Vector>(T.data(), n * n));
    }
  }
  const Vector g = Eigen::Map<const Vector>(G.data(), n * n);
  if (cols.empty()) return g.norm();
  Matrix S(n * n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) S.col(static_cast<Eigen::Index>(k)) = cols[k];
  const Vector coef = S.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(g);
  return (S * coef - g).norm();
}

inline std::uint64_t fnv1a(const Matrix& M) {
  std::uint64_t h = 1469598103934665603ULL;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      const double v = M(i, j);
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
      }
    }
  }
  return h;
}

inline Matrix skew_lower(const Matrix& X) {
  const Matrix L = X.triangularView<Eigen::StrictlyLower>();
  return L - L.transpose();
}

inline Matrix random_matrix(std::uint64_t seed, int rows, int cols) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = normal(rng);
  return M;
}

inline Matrix random_sym(std::uint64_t seed, int n) {
  const Matrix G = random_matrix(seed, n, n);
  return 0.5 * (G + G.transpose());
}

}  // namespace oracle
