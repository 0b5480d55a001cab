#include "isoflow/random.hpp"

#include <Eigen/QR>

namespace isoflow {

Matrix random_gaussian(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix G(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) G(i, j) = normal(rng);
  return G;
}

Matrix random_psd(Rng& rng, int N, int rank) {
  const Matrix G = random_gaussian(rng, N, rank);
  const Matrix A = G * G.transpose();
  return 0.5 * (A + A.transpose());
}

Matrix random_orthogonal(Rng& rng, int n) {
  const Eigen::HouseholderQR<Matrix> qr(random_gaussian(rng, n, n));
  Matrix Q = qr.householderQ();
  const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (R(j, j) < 0.0) Q.col(j) *= -1.0;
  return Q;
}

Matrix random_projector(Rng& rng, int N, int rank) {
  const Matrix Q = random_orthogonal(rng, N).leftCols(rank);
  const Matrix P = Q * Q.transpose();
  return 0.5 * (P + P.transpose());
}

SymMatrix random_symmetric(Rng& rng, int n) { return symmetric_part(random_gaussian(rng, n, n)); }

SymMatrix random_in_pattern(Rng& rng, const SparsityPattern& pattern) {
  return pattern_project(pattern, random_symmetric(rng, pattern.n()));
}

Matrix random_skew(Rng& rng, int n) {
  const Matrix G = random_gaussian(rng, n, n);
  return G - G.transpose();
}

int random_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace isoflow
