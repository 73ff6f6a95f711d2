#pragma once

#include <stdexcept>

namespace myvt {

/// Raised when a vector or matrix shape does not fit the operator it is passed to.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A NaN or infinity appeared in a forward pass, gradient, or parameter update.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace myvt
