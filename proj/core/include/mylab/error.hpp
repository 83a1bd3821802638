#pragma once

#include <stdexcept>
#include <string>

namespace mylab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Gamma evaluated at a nonpositive integer.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Quadrature or iterative scheme failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Series parameter too close to a resonant value (2*lambda a nonzero integer).
class ResonanceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Truncated series tail estimate exceeds the requested tolerance.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double tail)
      : std::runtime_error(what), tail_(tail) {}
  double tail() const noexcept { return tail_; }

 private:
  double tail_;
};

/// Numerical state escaped the region where the integrator is meaningful.
class IntegratorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Statistical test called with unusable input (too few samples, zero variance).
class SampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Experiment configuration that cannot be honoured (bad key or value).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Experiment name not in the registry.
class UnknownExperiment : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace mylab
