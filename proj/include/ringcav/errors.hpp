#pragma once

#include <stdexcept>
#include <string>

namespace ringcav {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A physical input violates its stated invariant.
struct InvalidParameter : Error {
  using Error::Error;
};

// A derived quantity left its mathematical domain (negative radicand, ...).
struct DomainError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

// Precondition of an operation not met (e.g. Lyapunov on an unstable drift).
struct PreconditionError : Error {
  using Error::Error;
};

// Mismatched inputs supplied by the caller.
struct UsageError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace ringcav
