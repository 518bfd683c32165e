#pragma once

#include <stdexcept>
#include <string>

namespace rectspec {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or index dimensions do not match the tensor shape.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation
// (p < 1, nonpositive coordinate in a cone operation, off-sphere input).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation only defined for particular tensor orders.
class UnsupportedOrderError : public Error {
 public:
  using Error::Error;
};

// Solver called outside the regime r/p + s/q it supports.
class RegimeError : public Error {
 public:
  using Error::Error;
};

// A structural hypothesis (partial symmetry, weak irreducibility) fails.
// hypothesis() names the failed condition.
class StructureError : public Error {
 public:
  StructureError(std::string hypothesis, const std::string& what)
      : Error(what), hypothesis_(std::move(hypothesis)) {}

  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

// Brute-force oracle asked to run at a size it cannot enumerate.
class ScaleError : public Error {
 public:
  using Error::Error;
};

// Malformed text input. line() is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rectspec
