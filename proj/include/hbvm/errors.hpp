#pragma once

#include <stdexcept>
#include <string>

namespace hbvm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A method or problem parameter violates its precondition (k < s, bad degree, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A Legendre index exceeded the basis' max_degree.
class DegreeOverflowError : public Error {
 public:
  using Error::Error;
};

/// Second-order coefficient functions need s >= 2; with s = 1 the weight
/// function collapses to 1 instead of 1 - c.
class UnsupportedTruncationError : public Error {
 public:
  using Error::Error;
};

/// The implicit stage system did not converge within max_iter.
class StepFailureError : public Error {
 public:
  StepFailureError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// A state component became non-finite or exceeded 1e300.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

/// Malformed serialized tableau or unknown format.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hbvm
