#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treespace {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_ = 0;
  std::size_t column_ = 0;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class LeafSetMismatch : public Error {
 public:
  LeafSetMismatch() : Error("trees are defined on different leaf sets") {}
  using Error::Error;
};

// Raised when an operation needs a stratum it does not support (a non-binary
// base for the log map, codimension two or more for book charts).
class UnsupportedStratum : public Error {
 public:
  using Error::Error;
};

// Raised when a derivative is requested at a tree whose geodesic support has
// tied ratios. Phi is only directionally differentiable there.
class CellBoundary : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace treespace
