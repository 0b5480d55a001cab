#include "isoflow/symspace.hpp"

#include "isoflow/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace isoflow {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

void require_same_order(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": order mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

}  // namespace

int tri_order(int len) {
  if (len < 0) return -1;
  int n = static_cast<int>(std::lround((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0));
  return tri_size(n) == len ? n : -1;
}

std::pair<int, int> packed_pair(int n, int p) {
  int k = 0;
  int start = 0;
  while (p >= start + (n - k)) {
    start += n - k;
    ++k;
  }
  const int r = p - start;
  return {r, r + k};
}

// ---------------------------------------------------------------------------
// SparsityPattern

SparsityPattern::SparsityPattern(int n, const std::vector<std::pair<int, int>>& entries)
    : SparsityPattern(n) {
  if (n <= 0) throw InputError("pattern order must be positive");
  for (auto [i, j] : entries) {
    if (i < 1 || i > n || j < 1 || j > n) {
      throw InputError("pattern index (" + std::to_string(i) + "," + std::to_string(j) +
                       ") outside 1.." + std::to_string(n));
    }
    mask_[static_cast<std::size_t>((i - 1) * n + (j - 1))] = true;
  }
  for (int i = 0; i < n; ++i) {
    if (!contains(i, i)) {
      throw InputError("pattern is missing diagonal entry (" + std::to_string(i + 1) + "," +
                       std::to_string(i + 1) + ")");
    }
    for (int j = 0; j < n; ++j) {
      if (contains(i, j) != contains(j, i)) {
        throw InputError("pattern is not symmetric at (" + std::to_string(i + 1) + "," +
                         std::to_string(j + 1) + ")");
      }
    }
  }
}

SparsityPattern SparsityPattern::full(int n) { return banded(n, n); }

SparsityPattern SparsityPattern::diagonal(int n) { return banded(n, 0); }

SparsityPattern SparsityPattern::banded(int n, int half_bandwidth) {
  SparsityPattern p(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(i - j) <= half_bandwidth) p.mask_[static_cast<std::size_t>(i * n + j)] = true;
  return p;
}

SparsityPattern SparsityPattern::nonzeros_of(const SymMatrix& X) {
  const int n = X.n();
  SparsityPattern p(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i == j || X(i, j) != 0.0) p.mask_[static_cast<std::size_t>(i * n + j)] = true;
  return p;
}

int SparsityPattern::count() const {
  return static_cast<int>(std::count(mask_.begin(), mask_.end(), true));
}

std::vector<std::pair<int, int>> SparsityPattern::entries() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (contains(i, j)) out.emplace_back(i + 1, j + 1);
  return out;
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix SymMatrix::identity(int n) {
  SymMatrix X(n);
  X.packed_.head(n).setOnes();
  return X;
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
  SymMatrix X(static_cast<int>(d.size()));
  X.packed_.head(d.size()) = d;
  return X;
}

SymMatrix SymMatrix::ramp(int n) { return diagonal(Vector::LinSpaced(n, 1.0, n)); }

SymMatrix SymMatrix::from_packed(int n, Vector packed) {
  if (packed.size() != tri_size(n)) {
    throw DimensionError("packed length " + std::to_string(packed.size()) + " does not match order " +
                         std::to_string(n));
  }
  SymMatrix X;
  X.n_ = n;
  X.packed_ = std::move(packed);
  return X;
}

SymMatrix SymMatrix::from_lower(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("from_lower: matrix is not square");
  const int n = static_cast<int>(M.rows());
  SymMatrix X(n);
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) X.set(i, j, M(i, j));
  return X;
}

SymMatrix SymMatrix::from_dense(const Matrix& M, double tol) {
  if (M.rows() != M.cols()) throw DimensionError("from_dense: matrix is not square");
  const int n = static_cast<int>(M.rows());
  const double scale = std::max(1.0, n == 0 ? 0.0 : M.cwiseAbs().maxCoeff());
  SymMatrix X(n);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) {
      if (std::abs(M(i, j) - M(j, i)) > tol * scale) {
        std::ostringstream msg;
        msg << "matrix is not symmetric at (" << i + 1 << "," << j + 1 << "): " << M(i, j)
            << " vs " << M(j, i);
        throw InputError(msg.str());
      }
      X.set(i, j, i == j ? M(i, i) : 0.5 * (M(i, j) + M(j, i)));
    }
  }
  return X;
}

Matrix SymMatrix::dense() const {
  Matrix M(n_, n_);
  for (int j = 0; j < n_; ++j)
    for (int i = j; i < n_; ++i) M(i, j) = M(j, i) = (*this)(i, j);
  return M;
}

SymMatrix SymMatrix::diag_part() const {
  SymMatrix D(n_);
  D.packed_.head(n_) = packed_.head(n_);
  return D;
}

SymMatrix SymMatrix::off_diag_part() const {
  SymMatrix O = *this;
  O.packed_.head(n_).setZero();
  return O;
}

double SymMatrix::frobenius_norm() const { return std::sqrt(frobenius_inner(*this, *this)); }

bool SymMatrix::is_diagonal() const {
  if (packed_.size() <= n_) return true;
  return packed_.tail(packed_.size() - n_).cwiseAbs().maxCoeff() == 0.0;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  require_same_order(n_, o.n_, "SymMatrix +");
  packed_ += o.packed_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  require_same_order(n_, o.n_, "SymMatrix -");
  packed_ -= o.packed_;
  return *this;
}

// ---------------------------------------------------------------------------
// SymOperator

SymOperator::SymOperator(int n, Matrix coeffs) : n_(n), coeffs_(std::move(coeffs)) {
  const int N = tri_size(n);
  if (coeffs_.rows() != N || coeffs_.cols() != N) {
    throw DimensionError("operator on Sym(" + std::to_string(n) + ") needs " + std::to_string(N) +
                         "x" + std::to_string(N) + " coefficients, got " +
                         std::to_string(coeffs_.rows()) + "x" + std::to_string(coeffs_.cols()));
  }
}

SymOperator SymOperator::identity(int n) { return {n, Matrix::Identity(tri_size(n), tri_size(n))}; }

SymOperator SymOperator::zero(int n) { return {n, Matrix::Zero(tri_size(n), tri_size(n))}; }

SymMatrix SymOperator::apply(const SymMatrix& Y) const {
  require_same_order(n_, Y.n(), "SymOperator::apply");
  return smat(coeffs_ * svec(Y));
}

bool SymOperator::is_self_adjoint(double tol) const {
  if (coeffs_.size() == 0) return true;
  const double scale = std::max(1.0, coeffs_.cwiseAbs().maxCoeff());
  return (coeffs_ - coeffs_.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

SymOperator operator+(const SymOperator& a, const SymOperator& b) {
  require_same_order(a.n_, b.n_, "SymOperator +");
  return {a.n_, a.coeffs_ + b.coeffs_};
}

SymOperator operator-(const SymOperator& a, const SymOperator& b) {
  require_same_order(a.n_, b.n_, "SymOperator -");
  return {a.n_, a.coeffs_ - b.coeffs_};
}

SymOperator operator*(const SymOperator& a, const SymOperator& b) {
  require_same_order(a.n_, b.n_, "SymOperator *");
  return {a.n_, a.coeffs_ * b.coeffs_};
}

SymOperator operator*(double s, const SymOperator& a) { return {a.n_, s * a.coeffs_}; }

// ---------------------------------------------------------------------------
// Free functions

double frobenius_inner(const SymMatrix& X, const SymMatrix& Y) {
  require_same_order(X.n(), Y.n(), "frobenius_inner");
  const int n = X.n();
  const auto& x = X.packed();
  const auto& y = Y.packed();
  const double diag = x.head(n).dot(y.head(n));
  const double off = x.tail(x.size() - n).dot(y.tail(y.size() - n));
  return diag + 2.0 * off;
}

double frobenius_inner(const Matrix& X, const Matrix& Y) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols()) {
    throw DimensionError("frobenius_inner: shape mismatch");
  }
  return X.cwiseProduct(Y).sum();
}

Matrix commutator(const Matrix& X, const Matrix& Y) {
  if (X.rows() != X.cols() || Y.rows() != Y.cols() || X.rows() != Y.rows()) {
    throw DimensionError("commutator: operands must be square of the same order");
  }
  return X * Y - Y * X;
}

SymMatrix symmetric_part(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("symmetric_part: matrix is not square");
  const int n = static_cast<int>(M.rows());
  SymMatrix X(n);
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i) X.set(i, j, i == j ? M(i, i) : 0.5 * (M(i, j) + M(j, i)));
  return X;
}

Vector svec(const SymMatrix& X) {
  const int n = X.n();
  Vector v = X.packed();
  v.tail(v.size() - n) *= kSqrt2;
  return v;
}

SymMatrix smat(const Vector& v) {
  const int n = tri_order(static_cast<int>(v.size()));
  if (n < 0) {
    throw DimensionError("smat: length " + std::to_string(v.size()) + " is not a triangular number");
  }
  Vector packed = v;
  packed.tail(packed.size() - n) /= kSqrt2;
  return SymMatrix::from_packed(n, std::move(packed));
}

SymOperator operator_from_action(const std::function<SymMatrix(const SymMatrix&)>& action, int n) {
  const int N = tri_size(n);
  Matrix C(N, N);
  Vector e = Vector::Zero(N);
  for (int p = 0; p < N; ++p) {
    e[p] = 1.0;
    const SymMatrix image = action(smat(e));
    require_same_order(image.n(), n, "operator_from_action");
    C.col(p) = svec(image);
    e[p] = 0.0;
  }
  return {n, std::move(C)};
}

SymMatrix pattern_project(const SparsityPattern& pattern, const SymMatrix& Y) {
  require_same_order(pattern.n(), Y.n(), "pattern_project");
  const int n = Y.n();
  SymMatrix out = Y;
  for (int p = n; p < tri_size(n); ++p) {
    auto [i, j] = packed_pair(n, p);
    if (!pattern.contains(i, j)) out.packed()[p] = 0.0;
  }
  return out;
}

SymOperator pattern_operator(const SparsityPattern& pattern) {
  const int n = pattern.n();
  const int N = tri_size(n);
  Vector d(N);
  for (int p = 0; p < N; ++p) {
    auto [i, j] = packed_pair(n, p);
    d[p] = pattern.contains(i, j) ? 1.0 : 0.0;
  }
  return {n, Matrix(d.asDiagonal())};
}

SymOperator double_bracket_operator(const SymMatrix& X) {
  // [[B, X], X] = B S - 2 X B X + S B with S = X^2, evaluated entrywise for
  // each basis matrix B = w (e_a e_b^T + e_b e_a^T).
  const int n = X.n();
  const int N = tri_size(n);
  const Matrix Xd = X.dense();
  const Matrix S = Xd * Xd;
  std::vector<std::pair<int, int>> pairs(static_cast<std::size_t>(N));
  for (int p = 0; p < N; ++p) pairs[static_cast<std::size_t>(p)] = packed_pair(n, p);

  Matrix C(N, N);
  for (int p = 0; p < N; ++p) {
    const auto [a, b] = pairs[static_cast<std::size_t>(p)];
    const double w = a == b ? 0.5 : 1.0 / kSqrt2;
    for (int q = p; q < N; ++q) {
      const auto [i, j] = pairs[static_cast<std::size_t>(q)];
      double m = -2.0 * (Xd(i, a) * Xd(b, j) + Xd(i, b) * Xd(a, j));
      if (i == a) m += S(b, j);
      if (i == b) m += S(a, j);
      if (j == b) m += S(i, a);
      if (j == a) m += S(i, b);
      m *= w;
      if (i != j) m *= kSqrt2;
      C(q, p) = m;
      C(p, q) = m;
    }
  }
  return {n, std::move(C)};
}

EigenDecomposition sym_eigen(const Matrix& M) {
  if (M.rows() != M.cols()) throw DimensionError("sym_eigen: matrix is not square");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(M);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

EigenDecomposition sym_eigen(const SymMatrix& X) { return sym_eigen(X.dense()); }

PseudoInverse psd_pseudo_inverse_detail(const Matrix& A, double rank_tol) {
  if (A.rows() != A.cols()) throw DimensionError("pseudo-inverse: matrix is not square");
  PseudoInverse out;
  const Eigen::Index N = A.rows();
  if (N == 0) {
    out.pinv = Matrix(0, 0);
    return out;
  }
  const auto [values, vectors] = sym_eigen(A);
  out.min_eigenvalue = values[0];
  out.max_eigenvalue = values[N - 1];
  const double scale = values.cwiseAbs().maxCoeff();
  if (values[0] < -1e-8 * scale) {
    std::ostringstream msg;
    msg << "operator is not positive semi-definite: eigenvalue " << values[0]
        << " against largest magnitude " << scale;
    throw NotPsdError(msg.str());
  }
  const double threshold = rank_tol * std::max(1.0, out.max_eigenvalue);
  Vector inv = Vector::Zero(N);
  for (Eigen::Index k = 0; k < N; ++k) {
    if (values[k] > threshold) {
      inv[k] = 1.0 / values[k];
      ++out.rank;
    }
  }
  out.truncated = out.rank < N;
  out.pinv = vectors * inv.asDiagonal() * vectors.transpose();
  // Symmetrize away rounding so self-adjointness is exact.
  out.pinv = 0.5 * (out.pinv + out.pinv.transpose()).eval();
  return out;
}

Matrix psd_pseudo_inverse(const Matrix& A, double rank_tol) {
  return psd_pseudo_inverse_detail(A, rank_tol).pinv;
}

Matrix psd_pseudo_inverse(const Matrix& A) {
  return psd_pseudo_inverse(A, default_rank_tol(static_cast<int>(A.rows())));
}

SymOperator psd_pseudo_inverse(const SymOperator& A, double rank_tol) {
  return {A.n(), psd_pseudo_inverse(A.coeffs(), rank_tol)};
}

SymOperator psd_pseudo_inverse(const SymOperator& A) {
  return psd_pseudo_inverse(A, default_rank_tol(A.dim()));
}

// ---------------------------------------------------------------------------
// Text format

SymMatrix read_matrix(std::istream& in) {
  long long n = 0;
  if (!(in >> n) || n <= 0 || n > 10000) throw InputError("matrix file: expected a positive order on the first line");
  const int order = static_cast<int>(n);
  Matrix M(order, order);
  for (int i = 0; i < order; ++i) {
    for (int j = 0; j < order; ++j) {
      if (!(in >> M(i, j))) {
        throw InputError("matrix file: expected " + std::to_string(order * order) +
                         " entries, ran out at row " + std::to_string(i + 1) + " column " +
                         std::to_string(j + 1));
      }
    }
  }
  std::string trailing;
  if (in >> trailing) throw InputError("matrix file: unexpected trailing token '" + trailing + "'");
  return SymMatrix::from_dense(M, 1e-12);
}

SymMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file '" + path + "'");
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const SymMatrix& X) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << X.n() << '\n' << std::setprecision(17);
  for (int i = 0; i < X.n(); ++i) {
    for (int j = 0; j < X.n(); ++j) {
      if (j) out << ' ';
      out << X(i, j);
    }
    out << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

void save_matrix(const std::string& path, const SymMatrix& X) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write matrix file '" + path + "'");
  write_matrix(out, X);
}

}  // namespace isoflow
