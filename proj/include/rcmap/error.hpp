#pragma once

#include <stdexcept>
#include <string>

namespace rcmap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An adaptive integral did not reach its requested tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double value, double estimate)
      : Error(what + " (value " + std::to_string(value) + ", error estimate " +
              std::to_string(estimate) + ")"),
        value_(value),
        estimate_(estimate) {}

  double value() const noexcept { return value_; }
  double estimate() const noexcept { return estimate_; }

 private:
  double value_;
  double estimate_;
};

/// The iterated chain mapping produced a residual density with significant
/// negative weight.
class MappingBreakdown : public Error {
 public:
  MappingBreakdown(int level, double min_value)
      : Error("mapping breakdown at chain level " + std::to_string(level) +
              " (residual minimum " + std::to_string(min_value) + ")"),
        level_(level) {}

  int level() const noexcept { return level_; }

 private:
  int level_;
};

}  // namespace rcmap
