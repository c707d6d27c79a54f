#pragma once

#include <stdexcept>
#include <string>

namespace starspec {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or configuration (bad labels, malformed weight spec, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A product channel fell outside the truncation under the "error" policy.
class LeakageError : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition of an operation is not met (e.g. a gauge
/// character that is not a fusion 1-cocycle).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// File system or cache format problems.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace starspec
