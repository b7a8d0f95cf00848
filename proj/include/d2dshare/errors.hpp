#pragma once

#include <stdexcept>
#include <string>

namespace d2dshare {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Scenario / input validation.
struct ValidationError : Error {
  ValidationError(const std::string& what, std::string path_ = "")
      : Error(path_.empty() ? what : path_ + ": " + what), path(std::move(path_)) {}
  std::string path;  // JSON-pointer-style location when known
};

struct InvalidDensity : ValidationError {
  using ValidationError::ValidationError;
};
struct InvalidFraction : ValidationError {
  using ValidationError::ValidationError;
};
struct PathlossTooFlat : ValidationError {
  using ValidationError::ValidationError;
};
struct ParseError : Error {
  using Error::Error;
};

// Numerics.
struct NonPositiveDistance : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct NoConvergence : Error {
  using Error::Error;
};

// Mode selection / game.
struct BothZero : Error {
  using Error::Error;
};
struct CellularInfeasible : Error {
  using Error::Error;
};
struct IntraD2DInfeasible : Error {
  using Error::Error;
};

// Monte Carlo.
struct WindowTooSmall : Error {
  using Error::Error;
};

}  // namespace d2dshare
