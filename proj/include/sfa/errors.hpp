#pragma once

#include <stdexcept>
#include <string>

namespace sfa {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A state outside the modelled domain (or outside every cell of a cover).
struct DomainError : Error {
  using Error::Error;
};

// Caller broke a documented precondition: dimension mismatch, non-symmetric
// matrix where a symmetric one is required, and so on.
struct ContractError : Error {
  using Error::Error;
};

struct DegenerateInputError : Error {
  using Error::Error;
};

// LMI assembly refused the data (e.g. target shape matrix too ill-conditioned to invert).
struct AssemblyError : Error {
  using Error::Error;
};

struct CapacityError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Persisted abstraction has the wrong schema version or is corrupt.
struct StorageError : Error {
  using Error::Error;
};

struct PolicyError : Error {
  using Error::Error;
};

// A certified transition was observed to fail in closed loop.
struct CertificationError : Error {
  using Error::Error;
};

}  // namespace sfa
