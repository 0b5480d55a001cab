#include "isoflow/fixtures.hpp"

#include "isoflow/errors.hpp"
#include "isoflow/flows.hpp"

#include <array>

namespace isoflow {

namespace {

template <std::size_t N>
SymMatrix from_rows(const std::array<std::array<double, N>, N>& rows) {
  Matrix M(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return SymMatrix::from_dense(M, 0.0);
}

SymMatrix example1() {
  return from_rows<6>({{
      {0.87, 1.23, 0, 0, 0, 0},
      {1.23, 1.67, 0.62, 0, 0, 0},
      {0, 0.62, 0.25, 1.17, 0, 0},
      {0, 0, 1.17, 0.79, 1.87, 0},
      {0, 0, 0, 1.87, 1.92, 1.63},
      {0, 0, 0, 0, 1.63, 1.8},
  }});
}

SymMatrix example2() {
  return from_rows<10>({{
      {1.7, 0, 0, 0, 0, 0, 1.92, 0, 0.48, 1.25},
      {0, 1.16, 1.16, 0.91, 1.56, 0, 0, 1.69, 0, 0},
      {0, 1.16, 0.48, 0, 0.90, 0, 0, 0, 0, 0},
      {0, 0.91, 0, 0.66, 0.88, 0, 0.93, 1.25, 0, 1.39},
      {0, 1.56, 0.9, 0.88, 0.3, 0, 0, 0, 0, 0},
      {0, 0, 0, 0, 0, 0.94, 1.49, 0.37, 0.88, 0},
      {1.92, 0, 0, 0.93, 0, 1.49, 1.12, 0.67, 0.4, 0},
      {0, 1.69, 0, 1.25, 0, 0.37, 0.67, 1.1, 0, 1.54},
      {0.48, 0, 0, 0, 0, 0.88, 0.4, 0, 0.44, 1.05},
      {1.25, 0, 0, 1.39, 0, 0, 0, 1.54, 1.05, 1.2},
  }});
}

}  // namespace

SymMatrix tridiag_toeplitz(int n, double off, double diag) {
  SymMatrix T(n);
  for (int i = 0; i < n; ++i) {
    T.set(i, i, diag);
    if (i + 1 < n) T.set(i, i + 1, off);
  }
  return T;
}

std::vector<std::string> fixture_names() {
  return {"example1", "example2", "t5", "t10", "ts5", "ts10", "shader", "circulant"};
}

Fixture fixture(std::string_view name) {
  if (name.starts_with("file:")) {
    const std::string path(name.substr(5));
    return {std::string(name), load_matrix(path), "matrix loaded from " + path};
  }
  if (name == "example1") return {"example1", example1(), "6x6 symmetric tridiagonal random matrix"};
  if (name == "example2") return {"example2", example2(), "10x10 symmetric random matrix with random zero pattern"};
  if (name == "t5") return {"t5", tridiag_toeplitz(5, 1.0, -2.0), "T5 = tridiag(1,-2,1)"};
  if (name == "t10") return {"t10", tridiag_toeplitz(10, 1.0, -2.0), "T10 = tridiag(1,-2,1)"};
  if (name == "ts5") return {"ts5", 36.0 * tridiag_toeplitz(5, 1.0, -2.0), "36 T5"};
  if (name == "ts10") return {"ts10", 121.0 * tridiag_toeplitz(10, 1.0, -2.0), "121 T10"};
  if (name == "shader") {
    return {"shader", shader_counterexample(1.0, 2.0, 2.0).E, "non-diagonal equilibrium, a=1 b=2"};
  }
  if (name == "circulant") return {"circulant", circulant_kernel_witness().X, "circulant(-2,1,0,1), n=4"};
  throw InputError("unknown fixture '" + std::string(name) + "'");
}

double default_t_final(std::string_view name) {
  if (name == "example1" || name == "example2") return 60.0;
  if (name == "t5" || name == "t10") return 200.0;
  if (name == "ts5" || name == "ts10") return 2.0;
  return 1.0;
}

}  // namespace isoflow
