#pragma once

#include <stdexcept>

namespace cochainflow {

/// Bad input: malformed files, inconsistent arguments, degree mismatches.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure did not meet its contract (failed factorization,
/// solver non-convergence, unconverged quadrature, blow-up).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cochainflow
