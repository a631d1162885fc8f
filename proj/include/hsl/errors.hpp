#pragma once

#include <stdexcept>
#include <string>

namespace hsl {

// Parameter/argument outside the contract of an operation (bad gamma, bad
// derivative order, mismatched grids, ...).  CLI maps this to exit code 2.
class DomainError : public std::invalid_argument {
public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Adaptive quadrature failed to reach the requested tolerance.  Carries the
// error estimate it did achieve so callers can report it.
class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error estimate " +
                           std::to_string(achieved) + ")"),
        achieved_error(achieved) {}
  double achieved_error;
};

// Improper-integral tail could not be extrapolated: the integrand stopped
// decaying on the last decade of the time grid.
class TailFitError : public std::runtime_error {
public:
  explicit TailFitError(const std::string& what) : std::runtime_error(what) {}
};

// A time integrator detected unbounded growth.  Carries the time at which the
// run was abandoned.  CLI maps this to exit code 3.
class BlowUpError : public std::runtime_error {
public:
  BlowUpError(const std::string& what, double t_at)
      : std::runtime_error(what + " (at t = " + std::to_string(t_at) + ")"),
        t(t_at) {}
  double t;
};

// A time step's local error estimate exceeded the allowed tolerance,
// i.e. the fixed log-time mesh is too coarse for the requested run.
class StepRejectedError : public std::runtime_error {
public:
  StepRejectedError(const std::string& what, double t_at)
      : std::runtime_error(what + " (at t = " + std::to_string(t_at) + ")"),
        t(t_at) {}
  double t;
};

// Differences between successive approximants failed to shrink.
class CauchyError : public std::runtime_error {
public:
  explicit CauchyError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration file problems (syntax, unknown keys, invalid values).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hsl
