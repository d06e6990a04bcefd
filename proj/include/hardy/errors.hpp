#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hardy {

/// Base class of every error raised by the library. The three subclasses map
/// one-to-one onto the command line exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input, invalid argument or out-of-domain parameter.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t position)
      : InputError(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A mathematical hypothesis required by the construction does not hold
/// (pair outside class A, c1*c2 above threshold, form not positive definite).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

class NotInClassA : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

class NotPositiveDefinite : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

/// Numerical procedure failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(const std::string& message, double partial_value, double estimate)
      : NumericalError(message), partial_value_(partial_value), estimate_(estimate) {}

  double partial_value() const noexcept { return partial_value_; }
  double error_estimate() const noexcept { return estimate_; }

 private:
  double partial_value_;
  double estimate_;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hardy
