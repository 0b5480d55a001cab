#pragma once

#include <stdexcept>
#include <string>

namespace isoflow {

// Operand orders or lengths do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operator expected to be positive semi-definite has a significantly
// negative eigenvalue.
class NotPsdError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Singular input where an inverse is required, division by a zero norm,
// or an eigensolver that failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user input: bad fixture name, unreadable or asymmetric matrix
// file, invalid configuration values.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Integrator step size collapsed below the underflow threshold.
class StiffnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace isoflow
