#pragma once

#include <stdexcept>
#include <string>

namespace scpg {

// Failure of a numerical routine (root finding, fixed point consistency,
// iterative eigenvalue estimation, ...). Distinct from precondition
// violations, which raise std::invalid_argument.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Power iteration exhausted its iteration budget. Carries the last
// estimate so callers can decide whether it is usable anyway.
class SpectralNormFailure : public NumericalError {
 public:
  SpectralNormFailure(const std::string& what, double best_estimate)
      : NumericalError(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

}  // namespace scpg
