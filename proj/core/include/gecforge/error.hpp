#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gecforge {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: unparseable M2 lines, corrupt model files, bad config
// values. Carries a 1-based line number when one is known (0 otherwise).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

// Structurally well-formed input that breaks a documented invariant, e.g.
// overlapping edit spans or an out-of-range span.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Failure to read or write a file or stream.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gecforge
