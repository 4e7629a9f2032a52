#pragma once

#include <stdexcept>
#include <string>

namespace glab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax or structural error in circuit source, with 1-based position.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error("line " + std::to_string(line) + ", col " + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A caller violated a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Wolfe's method exceeded its major-cycle cap.
class MinNormStalled : public Error {
 public:
  using Error::Error;
};

/// Binary search exceeded its iteration cap (oracle not as smooth as declared).
class BisectStalled : public Error {
 public:
  using Error::Error;
};

/// An iterate left the span of previously revealed coordinates.
class ZeroRespectViolation : public Error {
 public:
  ZeroRespectViolation(int step, int coordinate)
      : Error("zero-respecting violation at t=" + std::to_string(step) + ", coordinate " + std::to_string(coordinate)),
        step_(step),
        coordinate_(coordinate) {}

  int step() const { return step_; }
  /// 1-based coordinate index.
  int coordinate() const { return coordinate_; }

 private:
  int step_;
  int coordinate_;
};

}  // namespace glab
