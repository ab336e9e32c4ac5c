#pragma once

#include <stdexcept>
#include <string>

namespace ellspec {

/// Bad user-facing configuration: unknown/malformed keys, values that violate
/// an operation precondition. The CLI maps this (and std::invalid_argument)
/// to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure inside a solver: non-convergence within the iteration
/// budget, loss of positive definiteness. The CLI maps this to exit code 2.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, double achieved_residual = -1.0)
      : std::runtime_error(what), achieved_residual(achieved_residual) {}

  /// Relative residual reached before giving up; -1 when not applicable.
  double achieved_residual;
};

}  // namespace ellspec
