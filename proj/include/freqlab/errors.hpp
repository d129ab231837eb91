#pragma once

#include <stdexcept>
#include <string>

namespace freqlab {

/// Base class for all freqlab errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument or construction parameter (bad field spec, bad rule order, ...).
struct ParameterError : Error {
  using Error::Error;
};

/// Evaluation requested outside a field's admissible domain.
struct DomainError : Error {
  using Error::Error;
};

/// A quantity needed by a check is degenerate (zero denominator, critical point, ...).
struct DegenerateError : Error {
  using Error::Error;
};

/// A documented operation precondition does not hold for the given inputs.
struct PreconditionError : Error {
  using Error::Error;
};

/// Iterative solver failed to reach the requested tolerance.
struct NonconvergenceError : Error {
  double last_residual = 0.0;
  NonconvergenceError(const std::string& msg, double residual)
      : Error(msg), last_residual(residual) {}
};

/// Malformed configuration or CLI usage.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace freqlab
