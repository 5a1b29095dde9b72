#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

/// Malformed input: bad descriptor, length mismatch, nonpositive entry.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A hypothesis of the requested computation does not hold for the inputs.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite data cannot decide the requested quantity.
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exact construction would exceed its configured size budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hardy
