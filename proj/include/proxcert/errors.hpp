#pragma once

#include <stdexcept>
#include <string>

namespace proxcert {

/// Base class for all library errors; callers can catch this wholesale.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Construction-time problems: malformed oracle or problem specs.
struct InvalidSpecError : Error {
  using Error::Error;
};

// Curvature or rate constants outside their admissible range (mu > L, eta*t > 1, ...).
struct InvalidConstantsError : Error {
  using Error::Error;
};

// Nonfinite values where finite ones are required.
struct NumericError : Error {
  using Error::Error;
};

// Query outside the domain of the nonsmooth term.
struct DomainError : Error {
  using Error::Error;
};

// Operation requires structure the oracle does not declare (e.g. separability).
struct UnsupportedStructureError : Error {
  using Error::Error;
};

// A bound coefficient diverges for the supplied constants (mu*t >= 1).
struct SingularCoefficientError : Error {
  using Error::Error;
};

// Interpolation residual check failed in the mu == L limit.
struct DegenerateInterpolationError : Error {
  using Error::Error;
};

// Iterate records are missing fields or are not consecutive.
struct IncompleteRecordError : Error {
  using Error::Error;
};

// Contraction measurement started from a point with zero prox-gradient.
struct DegenerateStartError : Error {
  using Error::Error;
};

// 1D minimization bracket does not enclose a convex-looking objective.
struct BracketError : Error {
  using Error::Error;
};

// Objective not finite at the requested start point.
struct StartPointError : Error {
  using Error::Error;
};

// Trace and problem do not belong together.
struct ConsistencyError : Error {
  using Error::Error;
};

}  // namespace proxcert
