#pragma once

#include <stdexcept>
#include <string>

namespace bore {

// Base class for all solver errors so callers can catch the whole family.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite or non-ordered densities, bad grid sizes, malformed arguments.
struct InvalidParameterError : Error {
  using Error::Error;
};

// rho1 == rho2: no density jump, the dynamic condition degenerates.
struct DegenerateStratificationError : Error {
  using Error::Error;
};

// A laminar state with lower depth outside (0,1).
struct InvalidStateError : Error {
  using Error::Error;
};

// lambda + zeta leaves (0,1): the interface would exit the channel.
struct OutOfChannelError : Error {
  using Error::Error;
};

// lambda == lambda*: the two rest points of the long-wave model coincide.
struct DegenerateRestPointError : Error {
  using Error::Error;
};

// h_p <= 0 somewhere: the front left the admissible (stagnation-free) set.
struct StagnationViolationError : Error {
  using Error::Error;
};

// Newton line search cannot keep h_p > 0 at any step length.
struct BoundaryOfDomainError : Error {
  using Error::Error;
};

// Newton ran out of iterations or the line search stalled.
struct ConvergenceFailureError : Error {
  using Error::Error;
};

// Linear algebra breakdown (singular factorization, eigensolver failure).
struct NumericalFailureError : Error {
  using Error::Error;
};

// Branch seeding at onset failed.
struct OnsetFailureError : Error {
  using Error::Error;
};

// Config file violates the schema.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace bore
