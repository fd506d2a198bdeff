#pragma once

#include <stdexcept>
#include <string>

namespace hrom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape mismatch or non-finite input.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the admissible range (rank too large, empty split, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operation invoked in the wrong order (e.g. backward before forward).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Training diverged (NaN loss or gradient).
class OptimizationError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or architecture.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// PDE integration blew up.
class SimulationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace hrom
