#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cimeter {

/// Malformed arguments, files or specs, and violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A squared measure came out below the negative tolerance, or a linear solve broke down.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Smoothing weights could not be normalized because every kernel value underflowed.
class EmptyNeighborhoodError : public InputError {
 public:
  EmptyNeighborhoodError(const std::string& what, std::vector<std::int64_t> rows)
      : InputError(what), rows_(std::move(rows)) {}

  /// Offending evaluation rows (empty when a single free query point failed).
  [[nodiscard]] const std::vector<std::int64_t>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::int64_t> rows_;
};

}  // namespace cimeter
