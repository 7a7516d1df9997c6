#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noisypower {

// Base class for every failure this library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes of two operands are incompatible.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A matrix expected to have independent columns lost rank during
// orthonormalization. `column` is the zero-based offending column.
class RankDeficient : public Error {
 public:
  RankDeficient(const std::string& what, std::size_t column)
      : Error(what), column(column) {}
  std::size_t column;
};

// The Jacobi sweep budget was exhausted without reaching the off-diagonal
// tolerance.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

// A matrix handed to OrthonormalBasis is not orthonormal within tolerance.
class InvalidBasis : public Error {
 public:
  using Error::Error;
};

// A parameter violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// sigma_k <= sigma_{k+1}; iteration-count formulas need a positive gap.
class GapNonpositive : public Error {
 public:
  using Error::Error;
};

// Privacy budget or mechanism/neighborhood pairing is invalid.
class InvalidBudget : public Error {
 public:
  using Error::Error;
};

// A sample stream ran out before the requested number of draws.
class StreamExhausted : public Error {
 public:
  using Error::Error;
};

// No scale factor in the admissible range satisfies the pilot tail check.
class CalibrationFailed : public Error {
 public:
  using Error::Error;
};

// Input exceeds the brute-force budget of an oracle routine.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace noisypower
