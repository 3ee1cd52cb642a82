#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace cimeter {

struct BenchOptions {
  std::vector<Eigen::Index> sizes{128, 256, 512, 1024};
  std::vector<std::string> estimators{"avg_hscic", "hscic_vstat", "hscic_trace", "gcdcov_avg"};
  int repeats = 3;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::string estimator;
  Eigen::Index n = 0;
  double seconds = 0.0;  // fastest of the repeats, Gram construction included
};

/// Times each estimator on gaussian_ci data at each size.
std::vector<BenchRow> run_bench(const BenchOptions& options = {});

/// seconds(n_to) / seconds(n_from) for one estimator; throws if either row is missing.
double growth_factor(const std::vector<BenchRow>& rows, const std::string& estimator, Eigen::Index n_from,
                     Eigen::Index n_to);

}  // namespace cimeter
