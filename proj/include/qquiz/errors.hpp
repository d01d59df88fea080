#pragma once

#include <stdexcept>
#include <string>

namespace qquiz {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (shape, range, hermiticity...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A site index outside 1..N.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Dense dimension or sweep size beyond the configured limits.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A Bloch vector too short to define a direction, so angles are meaningless.
class UndefinedDirectionError : public Error {
 public:
  using Error::Error;
};

/// Every rotation angle is stationary (sum of sines and cosines both vanish).
class IndeterminateOptimumError : public Error {
 public:
  using Error::Error;
};

/// Oracle asked for more queries than its budget allows.
class QueryBudgetError : public Error {
 public:
  using Error::Error;
};

}  // namespace qquiz
