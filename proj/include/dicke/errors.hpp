#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

// Base of every error raised by the library. Two families exist: configuration
// problems (bad input, exit code 1 in the CLI) and numerical failures (exit 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// theta == pi: the stereographic coordinate zeta is infinite.
class PoleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// |cos(theta)| too small for the symmetry-adapted surface.
class NearSingularError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The odd-parity projection vanishes (field and spin both at their vacua).
class DegenerateStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class NoTransitionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TrackingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientCutoffError : public NumericalError {
 public:
  InsufficientCutoffError(const std::string& what, double leakage)
      : NumericalError(what), leakage_(leakage) {}
  double leakage() const { return leakage_; }

 private:
  double leakage_;
};

class DimensionMismatchError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace dicke
