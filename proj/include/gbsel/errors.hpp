#pragma once

#include <stdexcept>
#include <string>

namespace gbsel {

/// Operands live in rings of different dimension or width.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Monomial quotient requested where the divisor does not divide.
class DivisibilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DivisionByZero : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation called in a state that does not admit it (empty pair set,
/// step after episode end, ...).
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvalidAction : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Malformed text or file input. Carries an optional 1-based position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, int line, int column) {
    if (line <= 0) return what;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + what;
  }

  int line_;
  int column_;
};

/// Persisted data (model files, configs) does not match what is expected.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gbsel
