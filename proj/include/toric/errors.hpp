#pragma once

#include <stdexcept>
#include <string>

namespace toric {

/// Input violates a precondition (p outside (0,1), f not positive, |det U| != 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed geometric input: non-convex, repeated or non-rational vertices.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Adaptive quadrature ran out of depth before reaching its tolerance.
/// Carries the best estimate obtained so far.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(const std::string& what, double best_estimate, double error_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate), error_estimate_(error_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double best_estimate_;
  double error_estimate_;
};

/// A pointwise integrand returned a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Case the library deliberately does not handle (gamma = 0 slice, non-2-D input).
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace toric
