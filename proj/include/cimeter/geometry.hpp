#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cimeter {

/// n points of equal dimension, one per row. Row-major so a row is a contiguous span.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using PointView = std::span<const double>;

inline PointView row_view(const PointSet& points, Eigen::Index i) {
  return {points.data() + i * points.cols(), static_cast<std::size_t>(points.cols())};
}

struct KernelSpec;
struct SemimetricSpec;

namespace semimetric {

/// ||a - b||
struct Euclidean {};

/// ||a - b||^alpha, 0 < alpha <= 2 (negative type exactly on that range).
struct EuclideanPower {
  double alpha;
};

/// (k(a,a) + k(b,b))/2 - k(a,b)
struct KernelInduced {
  std::shared_ptr<const KernelSpec> base;
};

}  // namespace semimetric

namespace kernel {

/// exp(-||a-b||^2 / (2 bandwidth^2)); an empty bandwidth means "median heuristic".
struct Gaussian {
  std::optional<double> bandwidth;
};

/// exp(-||a-b|| / scale); an empty scale means "median heuristic".
struct Laplacian {
  std::optional<double> scale;
};

/// rho(a,anchor) + rho(b,anchor) - rho(a,b). An empty anchor is the origin.
struct DistanceInduced {
  std::shared_ptr<const SemimetricSpec> base;
  std::vector<double> anchor;
};

/// 1 if the points are identical coordinate-wise, else 0. Used for label-valued Z.
struct DiracDiscrete {};

/// left(a[:split], b[:split]) * right(a[split:], b[split:])
struct Product {
  std::shared_ptr<const KernelSpec> left;
  std::shared_ptr<const KernelSpec> right;
  Eigen::Index split;
};

}  // namespace kernel

struct SemimetricSpec {
  std::variant<semimetric::Euclidean, semimetric::EuclideanPower, semimetric::KernelInduced> variant;

  static SemimetricSpec euclidean() { return {semimetric::Euclidean{}}; }
  static SemimetricSpec euclidean_power(double alpha);
  static SemimetricSpec kernel_induced(KernelSpec base);
};

struct KernelSpec {
  std::variant<kernel::Gaussian, kernel::Laplacian, kernel::DistanceInduced, kernel::DiracDiscrete,
               kernel::Product>
      variant;

  static KernelSpec gaussian(std::optional<double> bandwidth = std::nullopt);
  static KernelSpec laplacian(std::optional<double> scale = std::nullopt);
  static KernelSpec dirac() { return {kernel::DiracDiscrete{}}; }
  static KernelSpec product(KernelSpec left, KernelSpec right, Eigen::Index split);
};

double eval_semimetric(const SemimetricSpec& spec, PointView a, PointView b);
double eval_kernel(const KernelSpec& spec, PointView a, PointView b);

/// k(x,x') = rho(x,anchor) + rho(x',anchor) - rho(x,x').
KernelSpec distance_induced_kernel(const SemimetricSpec& rho, std::vector<double> anchor = {});

/// rho(x,x') = (k(x,x) + k(x',x'))/2 - k(x,x').
SemimetricSpec kernel_induced_semimetric(const KernelSpec& k);

/// Median of the nonzero pairwise Euclidean distances between rows; 1 if there are none.
double median_heuristic(const PointSet& points);

/// True when every bandwidth/scale inside the spec is set.
bool is_resolved(const KernelSpec& spec);
bool is_resolved(const SemimetricSpec& spec);

/// Fills unset bandwidths from the median heuristic on `points` (split columns for products).
KernelSpec resolve(const KernelSpec& spec, const PointSet& points);
SemimetricSpec resolve(const SemimetricSpec& spec, const PointSet& points);

struct GramMatrix {
  Eigen::MatrixXd entries;
  KernelSpec spec;  // resolved
};

struct DistanceMatrix {
  Eigen::MatrixXd entries;
  SemimetricSpec spec;  // resolved
};

/// entries(i,j) = k(p_i, p_j), exactly symmetric. Unset bandwidths are resolved on `points`.
GramMatrix gram_matrix(const KernelSpec& spec, const PointSet& points);

/// entries(i,j) = rho(p_i, p_j), exactly symmetric with a zero diagonal.
DistanceMatrix distance_matrix(const SemimetricSpec& spec, const PointSet& points);

/// entries(i,j) = k(p_i, q_j). The spec must be resolved.
Eigen::MatrixXd cross_gram(const KernelSpec& spec, const PointSet& p, const PointSet& q);

struct NegativeTypeCheck {
  bool negative_type;  // true means no violation was found, not a proof
  double worst;        // largest quadratic form seen, for unit-norm zero-sum weights
};

/// Randomized falsifier for negative type: samples zero-sum unit-norm weight vectors
/// and reports the largest sum_ij a_i a_j rho(x_i, x_j).
NegativeTypeCheck check_negative_type(const SemimetricSpec& spec, const PointSet& points, int trials,
                                      std::uint64_t seed);

/// Same check on an explicit symmetric table of semimetric values.
NegativeTypeCheck check_negative_type(const Eigen::MatrixXd& table, int trials, std::uint64_t seed);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& symmetric);

/// min eigenvalue >= -rel_tol * trace.
bool is_psd(const Eigen::MatrixXd& symmetric, double rel_tol = 1e-8);

// Text syntax shared by the CLI, the Python module and result documents:
//
//   kernel  := gaussian[:BW] | laplacian[:SCALE] | dirac | distance[:METRIC][@A1,A2,...]
//   metric  := euclidean | euclidean^ALPHA | kernel:KERNEL
//
// Products have no text form; they are built programmatically.
KernelSpec parse_kernel_spec(std::string_view text);
SemimetricSpec parse_semimetric_spec(std::string_view text);
std::string to_string(const KernelSpec& spec);
std::string to_string(const SemimetricSpec& spec);

}  // namespace cimeter
