#pragma once

#include <stdexcept>
#include <string>

namespace smoothqr {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation
/// (tau outside (0,1), non-positive bandwidth or curvature, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Vector/matrix sizes or group structures that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or unusable configuration (fold counts, penalty options).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input files.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// The iterative solver could not make progress.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double phi) : Error(what), phi_(phi) {}

  /// Quadratic coefficient at the time of failure.
  double phi() const noexcept { return phi_; }

 private:
  double phi_;
};

}  // namespace smoothqr
