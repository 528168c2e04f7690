#pragma once

#include <stdexcept>
#include <string>

namespace fluxkit {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments or malformed inputs (non-Hermitian matrix, negative inductance, ...).
struct ValidationError : Error {
  using Error::Error;
};

// Truncation convergence contract not met; message names the offending mode.
struct ConvergenceError : Error {
  using Error::Error;
};

// Eigensolver failure with iteration diagnostics.
struct SolverError : Error {
  using Error::Error;
};

// A scan or bracket does not contain the requested feature.
struct RangeError : Error {
  using Error::Error;
};

// Composite eigenstate could not be matched to a bare product state.
struct IdentificationError : Error {
  using Error::Error;
};

// Quadrature or other numeric procedure failed to reach its tolerance.
struct NumericError : Error {
  using Error::Error;
};

// Malformed run configuration.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or inconsistent measured-data input.
struct DataError : Error {
  using Error::Error;
};

}  // namespace fluxkit
