#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsturm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- expr

class SyntaxError : public Error {
public:
  SyntaxError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

class UnknownIdentifier : public Error {
public:
  UnknownIdentifier(std::string name, std::size_t position)
      : Error("unknown identifier '" + name + "' at position " + std::to_string(position)),
        name_(std::move(name)), position_(position) {}
  const std::string& name() const { return name_; }
  std::size_t position() const { return position_; }

private:
  std::string name_;
  std::size_t position_;
};

class ArityError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class NonDifferentiable : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------- ivp

class BlowUp : public Error {
public:
  BlowUp(double x, std::vector<double> state)
      : Error("solution norm exceeded bound at x = " + std::to_string(x)), x_(x),
        state_(std::move(state)) {}
  explicit BlowUp(const std::string& what) : Error(what) {}
  double x() const { return x_; }
  /// State at the point the bound was exceeded (empty for PDE blow-up).
  const std::vector<double>& state() const { return state_; }

private:
  double x_ = 0.0;
  std::vector<double> state_;
};

class StepUnderflow : public Error {
public:
  using Error::Error;
};

class PathVanishes : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------- shoot

class ParabolicityViolated : public Error {
public:
  using Error::Error;
};

class NonHyperbolic : public Error {
public:
  using Error::Error;
};

/// p(pi, b) touches zero without crossing: a degenerate equilibrium.
class TangencySuspected : public NonHyperbolic {
public:
  TangencySuspected(const std::string& what, double b) : NonHyperbolic(what), b_(b) {}
  double b() const { return b_; }

private:
  double b_;
};

class WindowTooSmall : public Error {
public:
  using Error::Error;
};

class NotDissipativeOnProbe : public Error {
public:
  using Error::Error;
};

class EigenSolveFailure : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------- structure

class EndpointCollision : public Error {
public:
  using Error::Error;
};

class MultipleZeroSuspected : public Error {
public:
  using Error::Error;
};

class CrosscheckMismatch : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------- verify

class NoConvergence : public Error {
public:
  using Error::Error;
};

class GridMismatch : public Error {
public:
  using Error::Error;
};

class VerificationContradiction : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------- cli

class IoError : public Error {
public:
  using Error::Error;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

/// Caller violated a documented precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

}  // namespace qsturm
