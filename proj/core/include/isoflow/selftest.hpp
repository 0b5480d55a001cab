#pragma once

// Seeded property suites for the parallel-sum algebra and the flow identities.
// `isoflow selftest` runs all of them; each returns a count of passing cases
// and the worst normalized error seen.

#include "isoflow/symspace.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace isoflow {

struct SuiteResult {
  std::string name;
  int passed = 0;
  int total = 0;
  /// Largest error / threshold ratio (<= 1 means every case passed).
  double worst_ratio = 0.0;

  bool ok() const { return passed == total && total > 0; }
};

constexpr std::uint64_t kSelftestSeed = 20011;

SuiteResult suite_parallel_sum_symmetry(std::uint64_t seed, int cases = 200);
SuiteResult suite_parallel_sum_psd(std::uint64_t seed, int cases = 200);
SuiteResult suite_range_law(std::uint64_t seed, int cases = 200);
SuiteResult suite_kernel_law(std::uint64_t seed, int cases = 100);
SuiteResult suite_congruence(std::uint64_t seed, int cases = 200);
SuiteResult suite_harmonic_mean(std::uint64_t seed, int cases = 200);
SuiteResult suite_range_absorption(std::uint64_t seed, int cases = 200);
SuiteResult suite_kernel_sum(std::uint64_t seed, int cases = 100);
SuiteResult suite_uniqueness(std::uint64_t seed, int cases = 100);
SuiteResult suite_projector_intersection(std::uint64_t seed, int cases = 100);
SuiteResult suite_least_squares_maps(std::uint64_t seed, int cases = 100);
SuiteResult suite_toda_identity(std::uint64_t seed, int cases = 100);
SuiteResult suite_tridiagonal_bracket(std::uint64_t seed, int cases = 100);
SuiteResult suite_descent(std::uint64_t seed, int cases = 50);
SuiteResult suite_staircase(std::uint64_t seed);
SuiteResult suite_genericity();

/// Non-trivial staircase pattern of order 6: row i of the upper triangle
/// reaches column 3, 3, 5, 6, 6, 6.
SparsityPattern staircase_example();

std::vector<SuiteResult> run_selftest(std::uint64_t seed = kSelftestSeed);

}  // namespace isoflow
