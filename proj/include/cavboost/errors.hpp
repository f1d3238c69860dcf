#pragma once

#include <stdexcept>
#include <string>

namespace cavboost {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (unknown experiment, bad key, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A physical guard tripped: the simulation left the regime where its
/// results can be trusted.
class PhysicsGuardError : public Error {
 public:
  using Error::Error;
};

class LeakageError : public PhysicsGuardError {
 public:
  using PhysicsGuardError::PhysicsGuardError;
};

class TruncationError : public PhysicsGuardError {
 public:
  using PhysicsGuardError::PhysicsGuardError;
};

class SingularFieldError : public PhysicsGuardError {
 public:
  using PhysicsGuardError::PhysicsGuardError;
};

class DegeneracyError : public PhysicsGuardError {
 public:
  using PhysicsGuardError::PhysicsGuardError;
};

class UndefinedPhaseError : public PhysicsGuardError {
 public:
  using PhysicsGuardError::PhysicsGuardError;
};

class UnderflowError : public PhysicsGuardError {
 public:
  using PhysicsGuardError::PhysicsGuardError;
};

/// Integrator could not certify its result (norm drift or step floor).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace cavboost
