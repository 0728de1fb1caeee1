#pragma once

#include <stdexcept>
#include <string>

namespace annulus_nls {

// Invalid user-facing parameters (bad N/p/lambda, malformed config). CLI maps this to exit 4.
class InvalidParameterError : public std::invalid_argument {
public:
  explicit InvalidParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// Base for numerical failures. CLI maps these to exit 3.
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// No sign change could be established (shooting slope, eigenvalue or mass bracket).
class BracketError : public SolverError {
public:
  explicit BracketError(const std::string& what) : SolverError(what) {}
};

// An iteration (Newton, fixed point) failed to reach its tolerance.
class ConvergenceError : public SolverError {
public:
  explicit ConvergenceError(const std::string& what) : SolverError(what) {}
};

// Adaptive step fell below the representable/useful minimum.
class StepUnderflowError : public SolverError {
public:
  explicit StepUnderflowError(const std::string& what) : SolverError(what) {}
};

}  // namespace annulus_nls
