#pragma once

#include <stdexcept>
#include <string>

namespace presyn {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched dimensions between operands (matrix shapes, set dimensions, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Numerical solver failure (pivot limit, unexpected LP status, projection blowup).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A runtime invariant check failed. These checks are always on; a throw here
/// means the computation produced something the theory forbids.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Controller asked to act from a state outside its certified sets.
class InfeasibleStateError : public Error {
 public:
  using Error::Error;
};

/// Malformed problem description (JSON schema, automaton structure, ...).
class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace presyn
