#pragma once

#include <stdexcept>
#include <string>

namespace polymoments {

/// Base of every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed text input; `token` is the offending piece.
struct ParseError : Error {
  ParseError(const std::string& what, std::string token)
      : Error(what + ": '" + token + "'"), token(std::move(token)) {}
  std::string token;
};

/// Precondition violations on numeric arguments.
struct DomainError : Error {
  using Error::Error;
};

struct OverflowError : Error {
  using Error::Error;
};

/// Coefficient growth beyond the configured bit budget.
struct SizeError : Error {
  using Error::Error;
};

/// Iterative solver hit its cap.
struct ConvergenceError : Error {
  using Error::Error;
};

/// Evaluation on or too near the square-root cut.
struct BranchCutError : Error {
  using Error::Error;
};

/// Adaptive quadrature hit its depth limit.
struct QuadratureError : Error {
  QuadratureError(const std::string& what, double achieved)
      : Error(what + " (achieved error estimate " + std::to_string(achieved) + ")"), achieved(achieved) {}
  double achieved;
};

}  // namespace polymoments
