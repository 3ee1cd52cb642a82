#pragma once

#include "cimeter/conditional.hpp"
#include "cimeter/dataset.hpp"
#include "cimeter/rng.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cimeter {

enum class Statistic { avg_hscic, hscic_vstat, hscic_trace, gcdcov_avg };

Statistic parse_statistic(std::string_view text);
std::string to_string(Statistic s);

struct TestConfig {
  Statistic statistic = Statistic::hscic_trace;
  int B = 200;
  Eigen::Index knn = 10;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  KernelSpec kernel_x = KernelSpec::gaussian();
  KernelSpec kernel_y = KernelSpec::gaussian();
  KernelSpec kernel_z = KernelSpec::gaussian();
  SemimetricSpec metric_x = SemimetricSpec::euclidean();
  SemimetricSpec metric_y = SemimetricSpec::euclidean();
  SmoothingSpec smoothing;
  RegularizationSpec regularization;

  /// B >= 19, 2 <= knn, n >= 2 knn, alpha in (0, 1).
  void validate(Eigen::Index n) const;
};

struct TestReport {
  std::string statistic;
  double statistic_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  int B = 0;
  Eigen::Index knn = 0;
  Eigen::Index n = 0;
  std::string scheme = "local_permutation";
  std::uint64_t seed = 0;
  std::vector<double> replicate_values;
  ParamMap params;  // resolved estimator settings
};

/// Partition of the rows into groups of knn nearby Z values. Each group is seeded by
/// the unassigned row farthest from the centroid of the unassigned rows and filled with
/// its knn - 1 nearest unassigned rows; ties go to the lower row index. Once fewer than
/// 2 knn rows remain they form the last group. Requires n >= 2 knn.
std::vector<std::vector<Eigen::Index>> z_neighborhoods(const PointSet& z, Eigen::Index knn);

/// perm[i] is the row whose Y replaces row i. Rows only move within their group.
std::vector<Eigen::Index> neighborhood_permutation(const std::vector<std::vector<Eigen::Index>>& groups,
                                                   Eigen::Index n, CounterRng& rng);

/// (1 + #{replicates >= observed}) / (B + 1). Replicates within 1e-12 + 1e-9 |observed|
/// below the observed value count as ties, so round-off never decides a comparison.
double permutation_p_value(double observed, const std::vector<double>& replicates);

/// Observed statistic, B neighborhood-permuted replicates and the add-one p-value.
/// Replicate r draws from CounterRng(seed, r + 1); the report does not depend on thread count.
TestReport local_permutation_test(const TestConfig& cfg, const Dataset& d);

struct ExperimentRun {
  std::uint64_t data_seed = 0;
  std::uint64_t test_seed = 0;
  double statistic_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double runtime_ms = 0.0;
};

struct ExperimentSummary {
  int runs = 0;
  int rejections = 0;
  double rejection_rate = 0.0;
  double mean_statistic = 0.0;
  double mean_runtime_ms = 0.0;
  std::vector<ExperimentRun> per_run;
};

/// Repeated generate -> test. Run i uses data seed derive_seed(model.seed, i) and
/// test seed derive_seed(cfg.seed, i).
ExperimentSummary size_power_experiment(const TestConfig& cfg, const GeneratorSpec& model, int runs);

/// Kolmogorov-Smirnov distance between the empirical CDF of `values` and U(0, 1).
double ks_uniform_distance(std::vector<double> values);

}  // namespace cimeter
