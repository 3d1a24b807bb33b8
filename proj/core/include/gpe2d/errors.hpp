#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gpe2d {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates its documented domain (names the offending key).
class InvalidParameter : public Error {
 public:
  InvalidParameter(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Internal numerical failure (eigensolver, non-finite values, failed self-check).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// A coefficient field with no mass cannot be normalized.
class DegenerateState : public Error {
 public:
  using Error::Error;
};

/// Two fields refer to different bases.
class BasisMismatch : public Error {
 public:
  using Error::Error;
};

/// The quadrature cannot integrate the quartic terms exactly.
class DegenerateBasis : public Error {
 public:
  using Error::Error;
};

/// Iteration budget exhausted at the final continuation stage.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Armijo backtracking ran out of trial step lengths.
class LineSearchFailure : public Error {
 public:
  using Error::Error;
};

/// Thomas–Fermi algebra is undefined: det Θ = 0 or α_i = 0.
class SingularCoupling : public Error {
 public:
  using Error::Error;
};

/// The Thomas–Fermi module only handles unit-frequency, unit-mass traps.
class UnsupportedAnisotropy : public Error {
 public:
  using Error::Error;
};

/// Chemical-potential root finder could not meet the normalization conditions.
class NoSolution : public Error {
 public:
  using Error::Error;
};

/// A segregated trial kept almost none of the mass after masking.
class MaskCollapse : public Error {
 public:
  using Error::Error;
};

/// An operation's documented precondition is not met by its inputs.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// One or more limit properties of a κ-sweep failed.
class PropertyViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed file or configuration text.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace gpe2d
