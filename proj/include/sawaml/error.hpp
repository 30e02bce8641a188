#pragma once

#include <stdexcept>
#include <string>

namespace sawaml {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller violated an operation's precondition (bad shapes, empty input, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a usable result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or input files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sawaml
