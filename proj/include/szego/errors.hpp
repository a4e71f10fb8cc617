#pragma once

#include <stdexcept>
#include <string>

namespace szego {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(got)) {}
};

/// Raised by text parsers; line and column are 1-based.
struct ParseError : Error {
  ParseError(const std::string& msg, int line, int column)
      : Error("parse error at line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + msg),
        line(line),
        column(column) {}
  int line;
  int column;
};

struct NotCombinedDegree : Error {
  using Error::Error;
};

struct OnDiagonal : Error {
  OnDiagonal() : Error("on-diagonal evaluation") {}
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace szego
