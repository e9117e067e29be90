#pragma once

#include <stdexcept>

namespace pcone {

/// Base class for all pcone errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mathematical precondition violated: input not Hermitian / not positive
/// definite, exponent outside the supported range, a scalar function
/// evaluated outside its domain, a near-singular congruence factor.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// File or JSON parsing problem.
class IoError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver exhausted its budget; the message carries the last
/// residual or the iteration count.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcone
