#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subspec {

// Malformed input: rule text, catalog names, CLI values. Maps to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& message)
      : InputError("line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A well-formed request whose mathematical preconditions do not hold
// (non-primitive rule, zero weight vector, ...). Maps to exit code 2.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LengthCapExceeded : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// Integer overflow in exact arithmetic, non-convergent iteration. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace subspec
