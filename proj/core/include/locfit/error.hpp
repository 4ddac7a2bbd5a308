#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace locfit {

/// Base class of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Structurally valid input that disagrees with the expected layout.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A precondition on argument values was violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf appeared in a computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public Error {
 public:
  using Error::Error;
};

}  // namespace locfit
