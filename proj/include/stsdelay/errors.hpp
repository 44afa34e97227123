#pragma once

#include <stdexcept>
#include <string>

namespace stsdelay {

/// Input outside the domain of an operation (negative energy, frequency
/// below the outer cutoff, malformed geometry, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Configuration or data-file validation failure.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadrature, truncation or consistency failure during a numerical evaluation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The transmitted (or incident) spectrum carries no weight.
class DegenerateInputError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace stsdelay
