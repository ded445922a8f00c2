#pragma once

#include <stdexcept>
#include <string>

namespace cusplab {

// Violated precondition on user-supplied input (bad parameters, malformed text).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical procedure failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cusplab
