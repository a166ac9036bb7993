#pragma once

#include <stdexcept>
#include <string>

namespace glucolab {

/// Base for all library errors. `exit_code()` is what the CLI returns.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const noexcept { return 1; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 2; }
};

class MissingArtifactError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

/// Non-finite values in simulation or training.
class NumericalError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 4; }
};

/// The ODE state became non-finite. Not the clinical failure condition.
class SimulationDivergedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Malformed, truncated, or version-mismatched files.
class FormatError : public Error {
 public:
  using Error::Error;
  int exit_code() const noexcept override { return 3; }
};

class ChecksumError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace glucolab
