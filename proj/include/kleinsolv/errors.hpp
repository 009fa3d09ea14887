#pragma once

#include <stdexcept>
#include <string>

namespace kleinsolv {

/// Failure of a numeric precondition or postcondition (singular matrix,
/// non-hyperbolic spectrum, overflow, residual too large, ...).
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration, rejected before any computation.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace kleinsolv
