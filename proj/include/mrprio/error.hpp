#pragma once

#include <stdexcept>
#include <string>

namespace mrprio {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: unreadable files, parse failures,
/// invalid parameters, mismatched identifiers.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A metric or transform was asked to run on data it cannot handle
/// (e.g. the rule metric on a dataset without a class attribute).
class ApplicabilityError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace mrprio
