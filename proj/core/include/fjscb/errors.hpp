#pragma once

#include <stdexcept>
#include <string>

namespace fjscb {

/// Evaluation point or argument outside the admissible domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input file; the message carries the row/column location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent or invalid user configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failures: the penalized normal matrix is not positive definite,
/// or a fit is degenerate (e.g. Trace(H) >= n).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IllPosedFitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateFitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fjscb
