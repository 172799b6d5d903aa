#pragma once

#include <stdexcept>
#include <string>

namespace pimsner {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands live over different rings.
class RingMismatch : public Error {
 public:
  explicit RingMismatch(const std::string& where)
      : Error("ring mismatch in " + where) {}
};

// Vectors or operators belong to different functional modules.
class ModuleMismatch : public Error {
 public:
  explicit ModuleMismatch(const std::string& where)
      : Error("module mismatch in " + where) {}
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Input parsed but refers to something invalid (undeclared vertex, duplicate).
class SemanticError : public Error {
 public:
  SemanticError(const std::string& symbol, const std::string& msg)
      : Error(msg + ": '" + symbol + "'"), symbol_(symbol), detail_(msg) {}
  SemanticError(const std::string& symbol, const std::string& msg, int line)
      : Error("line " + std::to_string(line) + ": " + msg + ": '" + symbol + "'"),
        symbol_(symbol),
        detail_(msg),
        line_(line) {}
  const std::string& symbol() const { return symbol_; }
  const std::string& detail() const { return detail_; }
  // 0 when no source location is known.
  int line() const { return line_; }

 private:
  std::string symbol_;
  std::string detail_;
  int line_ = 0;
};

// A computation needs a larger truncation depth than configured.
class DepthError : public Error {
 public:
  using Error::Error;
};

class NotCompact : public Error {
 public:
  NotCompact() : Error("left action not compact") {}
};

// Bad argument values: non-square matrices, invalid presets, bad config.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A checked identity failed on data that passed validation.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace pimsner
