#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpsqvm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed kernel source. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parameter binding failures: arity mismatch, unknown or unbound names.
class BindError : public Error {
 public:
  using Error::Error;
};

/// Invalid programs or states at simulation time.
class ExecutionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data files (Hamiltonians). Line is 1-based.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mpsqvm
