#pragma once

#include <stdexcept>
#include <string>

namespace gpsens {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed inputs: dimension mismatches, unreadable rows, bad shapes.
class InputError : public Error {
 public:
  using Error::Error;
};

// A value violates a documented constraint (non-positive hyperparameter, q outside (0,1), ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Linear algebra broke down (Cholesky failed after the full jitter ladder, non-finite values).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Every MMLE restart failed; what() carries the per-restart diagnostics.
class FitError : public Error {
 public:
  using Error::Error;
};

// Every restart of a perturbation search diverged.
class OptimizationError : public Error {
 public:
  using Error::Error;
};

// The decision is already on the far side of the threshold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace gpsens
