#pragma once

#include "isoflow/symspace.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace isoflow {

struct Fixture {
  std::string name;
  SymMatrix X0;
  std::string description;
};

/// Built-in initial matrices:
///   example1   6x6 tridiagonal test matrix
///   example2   10x10 matrix with an irregular zero pattern
///   t5, t10    tridiag(1, -2, 1)
///   ts5, ts10  (n+1)^2 tridiag(1, -2, 1), i.e. 36 T5 and 121 T10
///   shader     the 3x3 non-diagonal equilibrium with a = 1, b = 2
///   circulant  circulant(-2, 1, 0, 1)
/// `file:<path>` loads the matrix text format. Throws InputError for unknown names.
Fixture fixture(std::string_view name);

std::vector<std::string> fixture_names();

/// Default horizon: 60 for example1/example2, 200 for t5/t10, 2 for ts5/ts10, 1 otherwise.
double default_t_final(std::string_view name);

/// Symmetric tridiagonal Toeplitz matrix with `diag` on the diagonal and `off` beside it.
SymMatrix tridiag_toeplitz(int n, double off, double diag);

}  // namespace isoflow
