#pragma once

#include <stdexcept>
#include <string>

namespace setd {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed model or mismatched dimensions.
class ModelError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public ModelError {
 public:
  using ModelError::ModelError;
};

// Target policy puts mass on an action the behavior policy never takes.
class CoverageError : public ModelError {
 public:
  using ModelError::ModelError;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// The behavior chain has no unique stationary distribution.
class NoStationaryDistributionError : public Error {
 public:
  using Error::Error;
};

// A caller broke an algorithm's input contract (e.g. ETD fed an i.i.d. stream).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Bad configuration file, grid file or CSV input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace setd
