#pragma once

// Symmetric-matrix algebra: sparsity patterns, lower-triangle-backed
// symmetric matrices, orthonormal coordinates on Sym(n), linear operators
// on Sym(n), and the eigendecomposition that backs every spectral
// computation in the library.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace isoflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Number of free coordinates of an n x n symmetric matrix, n(n+1)/2.
constexpr int tri_size(int n) { return n * (n + 1) / 2; }

/// Inverse of tri_size; returns -1 when len is not a triangular number.
/// n with n(n+1)/2 == len, or -1 if len is not triangular.
int tri_order(int len);

/// Position of the unordered pair {i, j} (0-based) in the packed layout.
///
/// Entries are grouped by distance from the diagonal: the main diagonal
/// first, then the first super-diagonal, and so on. For n = 3 this gives
/// (11),(22),(33),(12),(23),(13). Both SymMatrix storage and svec use it.
constexpr int packed_index(int n, int i, int j) {
  const int k = i > j ? i - j : j - i;
  const int r = i < j ? i : j;
  return k * n - k * (k - 1) / 2 + r;
}

/// Inverse of packed_index: the (row, col) pair with row <= col.
std::pair<int, int> packed_pair(int n, int p);

class SymMatrix;

/// Symmetric index set containing the diagonal. Defines Sym(pattern).
class SparsityPattern {
 public:
  SparsityPattern() = default;

  /// Builds a pattern from 1-based (i, j) pairs. Throws InputError unless
  /// every diagonal pair is present, the set is symmetric and all indices
  /// lie in 1..n.
  SparsityPattern(int n, const std::vector<std::pair<int, int>>& entries);

  static SparsityPattern full(int n);
  static SparsityPattern diagonal(int n);
  static SparsityPattern banded(int n, int half_bandwidth);
  static SparsityPattern tridiagonal(int n) { return banded(n, 1); }
  /// Nonzero pattern of X, plus the diagonal.
  static SparsityPattern nonzeros_of(const SymMatrix& X);

  int n() const { return n_; }
  /// 0-based membership test.
  bool contains(int i, int j) const { return mask_[static_cast<std::size_t>(i * n_ + j)]; }
  /// Number of (i, j) pairs in the pattern (both triangles).
  int count() const;
  /// 1-based pairs, row-major.
  std::vector<std::pair<int, int>> entries() const;

  bool operator==(const SparsityPattern&) const = default;

 private:
  explicit SparsityPattern(int n) : n_(n), mask_(static_cast<std::size_t>(n * n), false) {}

  int n_ = 0;
  std::vector<bool> mask_;
};

/// Real symmetric n x n matrix. Only one triangle is stored, so
/// X(i, j) == X(j, i) holds by construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n) : n_(n), packed_(Vector::Zero(tri_size(n))) {}

  static SymMatrix identity(int n);
  static SymMatrix diagonal(const Vector& d);
  /// diag(1, 2, ..., n).
  static SymMatrix ramp(int n);
  /// Wraps packed values (layout of packed_index, raw entries).
  static SymMatrix from_packed(int n, Vector packed);
  /// Copies the lower triangle of a square matrix; the upper is ignored.
  static SymMatrix from_lower(const Matrix& M);
  /// (M + M^T) / 2 after checking max|M - M^T| <= tol * max(1, max|M|).
  /// Throws DimensionError for non-square input, InputError for asymmetry.
  static SymMatrix from_dense(const Matrix& M, double tol = 1e-12);

  int n() const { return n_; }
  double operator()(int i, int j) const { return packed_[packed_index(n_, i, j)]; }
  void set(int i, int j, double v) { packed_[packed_index(n_, i, j)] = v; }

  const Vector& packed() const { return packed_; }
  Vector& packed() { return packed_; }

  Matrix dense() const;
  /// Diagonal entries as a vector.
  Vector diag() const { return packed_.head(n_); }
  SymMatrix diag_part() const;
  SymMatrix off_diag_part() const;
  double frobenius_norm() const;
  double max_abs() const { return n_ == 0 ? 0.0 : packed_.cwiseAbs().maxCoeff(); }
  bool is_diagonal() const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s) {
    packed_ *= s;
    return *this;
  }

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }
  bool operator==(const SymMatrix& o) const { return n_ == o.n_ && packed_ == o.packed_; }

 private:
  int n_ = 0;
  Vector packed_;
};

/// Linear operator on Sym(n) in the orthonormal svec coordinates.
class SymOperator {
 public:
  SymOperator() = default;
  /// Throws DimensionError unless coeffs is tri_size(n) square.
  SymOperator(int n, Matrix coeffs);

  static SymOperator identity(int n);
  static SymOperator zero(int n);

  int n() const { return n_; }
  int dim() const { return static_cast<int>(coeffs_.rows()); }
  const Matrix& coeffs() const { return coeffs_; }

  SymMatrix apply(const SymMatrix& Y) const;
  /// max |C - C^T| <= tol * max(1, max|C|).
  bool is_self_adjoint(double tol = 1e-12) const;

  friend SymOperator operator+(const SymOperator& a, const SymOperator& b);
  friend SymOperator operator-(const SymOperator& a, const SymOperator& b);
  friend SymOperator operator*(const SymOperator& a, const SymOperator& b);
  friend SymOperator operator*(double s, const SymOperator& a);

 private:
  int n_ = 0;
  Matrix coeffs_;
};

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // columns orthonormal
};

/// Trace(X Y^T).
double frobenius_inner(const SymMatrix& X, const SymMatrix& Y);
double frobenius_inner(const Matrix& X, const Matrix& Y);

/// XY - YX.
Matrix commutator(const Matrix& X, const Matrix& Y);

/// (M + M^T) / 2 without a symmetry check.
SymMatrix symmetric_part(const Matrix& M);

/// Coordinates in the basis {E_ii} and {(E_ij + E_ji)/sqrt(2), i < j}.
Vector svec(const SymMatrix& X);
/// Inverse of svec. Throws DimensionError when the length is not triangular.
SymMatrix smat(const Vector& v);

/// Materializes a linear map on Sym(n) column by column over the basis.
SymOperator operator_from_action(const std::function<SymMatrix(const SymMatrix&)>& action, int n);

/// Entries in the pattern are kept, everything else is set to exactly zero.
SymMatrix pattern_project(const SparsityPattern& pattern, const SymMatrix& Y);
/// The orthogonal projector onto Sym(pattern): a 0/1 diagonal in svec coordinates.
SymOperator pattern_operator(const SparsityPattern& pattern);

/// Y -> [[Y, X], X]. Self-adjoint and positive semi-definite.
SymOperator double_bracket_operator(const SymMatrix& X);

EigenDecomposition sym_eigen(const SymMatrix& X);
/// Eigendecomposition of a dense symmetric matrix (only the lower triangle is read).
EigenDecomposition sym_eigen(const Matrix& M);

/// Default rank cutoff for pseudo-inverses of N x N operators.
inline double default_rank_tol(int N) { return N * std::numeric_limits<double>::epsilon(); }

struct PseudoInverse {
  Matrix pinv;
  int rank = 0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  /// True when at least one eigenvalue was treated as zero.
  bool truncated = false;
};

/// Moore-Penrose inverse of a symmetric PSD matrix from its eigendecomposition.
/// Eigenvalues above rank_tol * max(1, lambda_max) are inverted, the rest are
/// dropped. Throws NotPsdError if an eigenvalue is below -1e-8 * max|lambda|.
PseudoInverse psd_pseudo_inverse_detail(const Matrix& A, double rank_tol);
Matrix psd_pseudo_inverse(const Matrix& A, double rank_tol);
Matrix psd_pseudo_inverse(const Matrix& A);
SymOperator psd_pseudo_inverse(const SymOperator& A, double rank_tol);
SymOperator psd_pseudo_inverse(const SymOperator& A);

// Matrix text format: first line n, then n rows of n decimals.

/// Parses the text format; asymmetry above 1e-12 or malformed input throws InputError.
SymMatrix read_matrix(std::istream& in);
SymMatrix load_matrix(const std::string& path);
/// Writes with 17 significant digits so values round-trip exactly.
void write_matrix(std::ostream& out, const SymMatrix& X);
void save_matrix(const std::string& path, const SymMatrix& X);

}  // namespace isoflow
