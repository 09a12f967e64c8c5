#pragma once

#include <stdexcept>
#include <string>

namespace arlo {

/// Base class of every exception raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatches, out-of-range indices, broken invariants.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configuration or pipeline that cannot be accepted as written.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace arlo
