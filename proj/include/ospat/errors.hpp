#pragma once

#include <stdexcept>
#include <string>

namespace ospat {

// Malformed arguments to an operation (bad labels, bad rectangles, etc).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class InvalidMapping : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class InvalidReport : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class SizeError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// File parse/format problems. `line` is 1-based, 0 when not tied to a line.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& where, std::size_t line, const std::string& what)
      : std::runtime_error(where + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Infeasible scenario description (e.g. a target starting outside the arena).
class DescriptorError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace ospat
