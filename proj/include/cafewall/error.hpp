#pragma once

#include <stdexcept>
#include <string>

namespace cafewall {

/// Raised when an argument violates a documented invariant. The message names
/// the offending parameter.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a window, crop or kernel does not fit the image it is applied to.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// File-system and codec failures.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cafewall
