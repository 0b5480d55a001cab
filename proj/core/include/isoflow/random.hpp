#pragma once

// Seeded generators for property checks and the instability probe.

#include "isoflow/symspace.hpp"

#include <cstdint>
#include <random>

namespace isoflow {

using Rng = std::mt19937_64;

Matrix random_gaussian(Rng& rng, int rows, int cols);
/// G G^T with G of size N x rank.
Matrix random_psd(Rng& rng, int N, int rank);
/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Matrix random_orthogonal(Rng& rng, int n);
/// Orthogonal projector onto a random subspace of dimension `rank`.
Matrix random_projector(Rng& rng, int N, int rank);
SymMatrix random_symmetric(Rng& rng, int n);
/// Random symmetric matrix supported on the pattern.
SymMatrix random_in_pattern(Rng& rng, const SparsityPattern& pattern);
/// Random skew-symmetric matrix.
Matrix random_skew(Rng& rng, int n);
int random_int(Rng& rng, int lo, int hi);

}  // namespace isoflow
