#pragma once

#include <stdexcept>
#include <string>

namespace pencilqp {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input matrix is not symmetric within the configured tolerance.
class NotSymmetric : public Error {
 public:
  using Error::Error;
};

/// The iterative eigensolver failed to converge.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Operand is not positive semidefinite where one is required.
class NotPSD : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// B is positive or negative semidefinite; the interval theory needs it
/// indefinite.
class BNotIndefinite : public Error {
 public:
  using Error::Error;
};

class VNotIndefinite : public Error {
 public:
  using Error::Error;
};

class IntervalNotOpen : public Error {
 public:
  using Error::Error;
};

class EmptyInterval : public Error {
 public:
  using Error::Error;
};

/// A seminorm was requested at a lambda outside the positivity interval.
class OutsideInterval : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteAtRho : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteAtLambda : public Error {
 public:
  using Error::Error;
};

class RhoZero : public Error {
 public:
  using Error::Error;
};

class RhoOutsideInterior : public Error {
 public:
  using Error::Error;
};

/// Two independent numerical criteria that must coincide disagreed;
/// usually a rank decision made too close to its threshold.
class InconsistentChecks : public Error {
 public:
  using Error::Error;
};

/// Gram matrix of a Krein space is singular (or too close to singular).
class GramNotInvertible : public Error {
 public:
  using Error::Error;
};

/// Monte-Carlo sampling never produced a vector on one sign side of the
/// quadratic form.
class NoSamplesOnSide : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace pencilqp
