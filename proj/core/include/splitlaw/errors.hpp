#pragma once

#include <stdexcept>
#include <string>

namespace splitlaw {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An argument lies outside the mathematical domain of an operation
/// (negative token counts, non-positive model size, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// The requested evaluation point is a pole of the formula
/// (D = D_k = 0 in the data term, token partials at a zero argument).
class SingularityError : public DomainError {
 public:
  explicit SingularityError(const std::string& msg) : DomainError(msg) {}
};

/// Malformed input data. Carries the 1-based row number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, long row = -1, const std::string& column = "")
      : Error(format(msg, row, column)), row_(row), column_(column) {}

  long row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  static std::string format(const std::string& msg, long row, const std::string& column) {
    std::string out = msg;
    if (row >= 0) out = "row " + std::to_string(row) + (column.empty() ? "" : ", column " + column) + ": " + msg;
    return out;
  }
  long row_ = -1;
  std::string column_;
};

/// A computation is structurally degenerate: empty split side, constant
/// regression targets, all model sizes equal, ...
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& msg) : Error(msg) {}
};

/// An iterative solve could not produce a usable result
/// (all basin-hopping chains failed, line search left the finite domain).
class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

/// File-level I/O or format failures (bad magic, shape mismatch).
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace splitlaw
