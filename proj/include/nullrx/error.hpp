#pragma once

#include <stdexcept>
#include <string>

namespace nullrx {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: a violated precondition, invariant or malformed file content.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nullrx
