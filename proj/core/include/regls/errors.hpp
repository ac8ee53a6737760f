#pragma once

#include <stdexcept>
#include <string>

namespace regls {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an input violates a structural precondition (NaN/Inf entries,
/// dimension mismatch, m < n, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// Raised when a scalar parameter is outside its admissible range (mu <= 0,
/// negative radius, ...).
class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

/// Raised when a nominal (or perturbed) matrix is rank deficient. The
/// estimators require full-rank data; there is no silent regularization.
class RankDeficientError : public Error {
 public:
  using Error::Error;
};

/// Raised by positive-definite solves when a Cholesky pivot fails.
class NotPositiveDefiniteError : public Error {
 public:
  NotPositiveDefiniteError(const std::string& what, int pivot)
      : Error(what), pivot_(pivot) {}

  /// Index of the first failing pivot.
  int pivot() const { return pivot_; }

 private:
  int pivot_;
};

/// Raised when an SDP solve does not reach Optimal status.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace regls
