#pragma once

#include <stdexcept>
#include <string>

namespace gw {

struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a numeric kernel produces a non-finite or singular result.
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ComplexityGuard : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedDimension : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DependencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PoleObstruction : std::runtime_error {
  PoleObstruction(const std::string& what, double re, double im)
      : std::runtime_error(what), pole_re(re), pole_im(im) {}
  double pole_re;
  double pole_im;
};

}  // namespace gw
