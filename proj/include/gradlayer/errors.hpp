#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gradlayer {

/// Thrown when an argument violates a shape or value contract
/// (dimension mismatch, non-scalar output where a scalar is required, ...).
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a computation produces or consumes a non-finite value.
/// `index` locates the offending entry (or loop step) when known.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg, std::ptrdiff_t index = -1)
      : std::runtime_error(index >= 0 ? msg + " (index " + std::to_string(index) + ")" : msg),
        index_(index) {}

  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  std::ptrdiff_t index_;
};

}  // namespace gradlayer
