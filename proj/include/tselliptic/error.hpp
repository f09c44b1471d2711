#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tselliptic {

/// Argument outside the time scale, empty interior, malformed segments.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Iterative numerical kernel failed to converge (signals a bug for valid input).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hypotheses required by a solver regime are missing or inconsistent.
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluating an expression hit division by zero, sqrt of a negative, etc.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax error in a time-scale literal or an expression; carries the byte offset.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::invalid_argument(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Invalid CLI configuration (unknown keys, wrong types, bad values).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace tselliptic
