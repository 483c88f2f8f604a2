#pragma once

#include <stdexcept>
#include <string>

namespace idx {

// Error categories map onto CLI exit codes: usage=1, data/schema=2, budget=3.
enum class ErrorKind { Usage, Data, Budget, Internal };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

// Malformed models, datasets, schemas, unknown variables/values, degenerate
// distributions: anything wrong with the inputs rather than the invocation.
class DataError : public Error {
public:
  explicit DataError(std::string message) : Error(ErrorKind::Data, std::move(message)) {}
};

// Bad API usage that a caller can fix by changing arguments (ratios out of
// range, kit/graph mismatch, duplicate relation labels, ...).
class UsageError : public Error {
public:
  explicit UsageError(std::string message) : Error(ErrorKind::Usage, std::move(message)) {}
};

// Counterfactual enumeration would exceed the configured combination budget.
class BudgetError : public Error {
public:
  explicit BudgetError(std::string message) : Error(ErrorKind::Budget, std::move(message)) {}
};

}  // namespace idx
