#pragma once

#include "cimeter/dataset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cimeter {

struct IdentityCheck {
  std::string name;
  bool passed = false;
  double max_deviation = 0.0;  // in the units of `tolerance`
  double tolerance = 0.0;
  int cases = 0;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  bool inject_fault = false;  // negative control: flips a sign inside one identity
};

struct VerifyReport {
  std::vector<IdentityCheck> checks;
  std::uint64_t seed = 0;
  [[nodiscard]] bool all_passed() const;
};

/// Runs every equivalence and oracle identity on seeded random data.
VerifyReport run_identity_suite(const VerifyOptions& options = {});

/// |a - b| / max(|a|, |b|, 1e-14).
double relative_deviation(double a, double b);

/// Dataset with independent standard normal entries, drawn from (seed, stream 0..2).
Dataset random_dataset(std::uint64_t seed, Eigen::Index n, Eigen::Index p, Eigen::Index q, Eigen::Index r);

/// Nonnegative weights summing to 1 with a random sparsity pattern.
Eigen::VectorXd random_weights(std::uint64_t seed, Eigen::Index n);

}  // namespace cimeter
