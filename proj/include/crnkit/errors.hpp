#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crnkit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed network text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A value violates a documented precondition (bad sizes, invalid network).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A concentration vector has a zero, negative or non-finite entry.
class NonPositiveConcentration : public Error {
 public:
  explicit NonPositiveConcentration(std::size_t index)
      : Error("concentration " + std::to_string(index) +
              " is not strictly positive"),
        index_(index) {}

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// An iterative method stopped without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (last residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace crnkit
