#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opal {

// Bad user input: unknown symbol or state, malformed JSON, bad lasso syntax.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two precedence matrices disagree on a cell.
class CompatibilityError : public std::runtime_error {
 public:
  CompatibilityError(const std::string& row, const std::string& col, const std::string& what)
      : std::runtime_error(what), row_(row), col_(col) {}
  const std::string& row() const { return row_; }
  const std::string& col() const { return col_; }

 private:
  std::string row_, col_;
};

// A word hits an empty precedence cell.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Automaton refers to undeclared states or symbols.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace opal
