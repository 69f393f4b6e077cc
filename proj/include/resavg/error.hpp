#pragma once

#include <stdexcept>
#include <string>

namespace resavg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent or out-of-range configuration (bad sizes, missing keys, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data violating a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Requested operation is not available for the given inputs.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during integration (blow-up guard tripped).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace resavg
