#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crowd {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems with user-supplied data or arguments. The CLI maps these to exit 1.
class InputError : public Error {
 public:
  using Error::Error;
};

class DuplicateAnnotationError : public InputError {
 public:
  using InputError::InputError;
};

// An object with no annotations where at least one is required.
class CoverageError : public InputError {
 public:
  using InputError::InputError;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

// Pearson/Spearman on a constant sequence.
class UndefinedCorrelationError : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace crowd
