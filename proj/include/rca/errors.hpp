#pragma once

#include <stdexcept>
#include <string>

namespace rca {

/// Precondition violation: bad sizes, out-of-range knobs, unknown atoms.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A rational payload was evaluated at (or numerically at) one of its poles.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative construction did not reach its target.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rca
