#pragma once

#include <stdexcept>
#include <string>

namespace curvtomo {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Adaptive integration did not reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

// Input violates a structural invariant (e.g. Riemann symmetries).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Probe pool cannot produce a full-rank design.
class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Weighted least-squares system is singular.
class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Boosted frame set does not determine all Riemann components.
class FrameSetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Config document failed schema validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace curvtomo
