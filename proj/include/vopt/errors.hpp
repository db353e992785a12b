#pragma once

#include <stdexcept>
#include <string>

namespace vopt {

/// Operand dimensions disagree (vector vs cone, point sets, problem data).
class DimensionMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative projection or descent exhausted its budget.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A point outside the domain of a merit function (e.g. nu off the region).
class InfeasiblePoint : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A theorem hypothesis required by a bound does not hold (sigma <= 1, ...).
class HypothesisViolated : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// The discretized feasible region is empty at some parameter.
class EmptyRegion : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Internal consistency check failed (solver vs order test, ival spread).
class NumericalFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Problem configuration rejected. `kind` distinguishes the diagnostic.
class ConfigError : public std::invalid_argument {
public:
  enum class Kind { Schema, NonPointedCone, Dimension, OutOfBox };

  ConfigError(Kind kind, const std::string& what)
      : std::invalid_argument(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

} // namespace vopt
