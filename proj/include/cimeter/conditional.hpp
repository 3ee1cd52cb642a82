#pragma once

#include "cimeter/dataset.hpp"
#include "cimeter/geometry.hpp"
#include "cimeter/measure.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace cimeter {

// ---------------------------------------------------------------------------
// Smoothing weights
// ---------------------------------------------------------------------------

/// Radial profile K(u) of the smoothing kernel, u = ||z - Z_i|| / t.
///   gaussian      exp(-u^2/2)
///   epanechnikov  (1 - u^2)_+
///   box           1[u <= 1]
enum class SmoothingShape { gaussian, epanechnikov, box };

struct SmoothingSpec {
  SmoothingShape shape = SmoothingShape::gaussian;
  std::optional<double> bandwidth;  // unset: median heuristic on Z times n^(-1/(4+r))
};

/// "gaussian[:T]", "epanechnikov[:T]", "box[:T]".
SmoothingSpec parse_smoothing_spec(std::string_view text);
std::string to_string(const SmoothingSpec& spec);

/// Constant c_r making c_r K(||u||) a probability density on R^r.
double smoothing_normalization(SmoothingShape shape, Eigen::Index r);

double smoothing_profile(SmoothingShape shape, double u);

/// median_heuristic(z) * n^(-1/(4+r)).
double default_smoothing_bandwidth(const PointSet& z);

/// w_i = theta_i(query) / theta(query), theta_i(q) = c_r t^-r K(||q - Z_i|| / t).
/// Throws EmptyNeighborhoodError when theta(query) < 1e-300.
Eigen::VectorXd smoothing_weights(const SmoothingSpec& spec, const PointSet& z, PointView query);

/// Row j holds the weights for eval point j; rows sum to 1.
struct ConditionalWeightMatrix {
  Eigen::MatrixXd w;
  PointSet eval_points;
  std::string scheme;      // to_string of the resolved smoothing spec, or "exact_match"
  double bandwidth = 0.0;  // 0 for exact_match
};

/// Weights at eval points (default: the rows of z). Every failing row is listed in the error.
ConditionalWeightMatrix conditional_weights(const SmoothingSpec& spec, const PointSet& z,
                                            const std::optional<PointSet>& eval_points = std::nullopt);

/// Uniform weights over the rows whose label equals the eval label exactly.
ConditionalWeightMatrix exact_match_weights(const PointSet& z);

/// Weights used by the dataset-level estimators: exact-match strata for a discrete Z
/// with no explicit bandwidth, kernel smoothing otherwise.
ConditionalWeightMatrix dataset_weights(const Dataset& d, const SmoothingSpec& spec);

struct RegularizationSpec {
  std::optional<double> lambda;  // unset: 1e-3 * mean(diag K_Z)
};

// ---------------------------------------------------------------------------
// Gram-level kernels of the estimators. Matrices are symmetric n x n; weights normalized.
// ---------------------------------------------------------------------------
namespace gram {

/// Squared embedding distance of the weighted joint law from the product of its marginals.
double hscic_at(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::VectorXd& w);

/// Inner product of the two weighted joint-minus-product embeddings.
double h_hat(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::VectorXd& w1,
             const Eigen::VectorXd& w2);

/// hscic_at for every row of W at once (unclamped), via O(n^3) matrix products.
/// Works unchanged for distance matrices, giving the gCdCov values.
Eigen::VectorXd pointwise_hscic(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& w);

/// H(j, j') = h_hat(W_j, W_j') for all pairs, seven matrix products.
Eigen::MatrixXd h_matrix(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& w);

/// (1/n^2) sum_jj' kz(j, j') H(j, j')
double vstat_from_h(const Eigen::MatrixXd& kz, const Eigen::MatrixXd& h);

double default_lambda(const Eigen::MatrixXd& kz);

/// Tr[Kxz~ M Ky~ M], M = nH - (Kz~ + lambda I)^-1 Kz~, K~ = K H, H = (I - 11'/n)/n.
double hscic_trace(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& kz, double lambda);

/// G with hscic_trace(kx, ky, kz, lambda) = sum_ij G(i,j) ky(j,i) for every symmetric ky.
/// Lets permutation replicates of Y cost O(n^2) each.
Eigen::MatrixXd trace_sandwich(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& kz, double lambda);

}  // namespace gram

// ---------------------------------------------------------------------------
// Dataset-level estimators
// ---------------------------------------------------------------------------

/// Generalized conditional distance covariance under the weighted empirical law.
MeasureResult gcdcov_at(const SemimetricSpec& rx, const SemimetricSpec& ry, const Dataset& d,
                        const Eigen::VectorXd& w);

/// Pointwise HSCIC under the weighted empirical law.
MeasureResult hscic_at(const KernelSpec& kx, const KernelSpec& ky, const Dataset& d, const Eigen::VectorXd& w);

/// Plug-in h(z, z') for two weight vectors. Unclamped: it is an inner product, not a norm.
double h_hat(const KernelSpec& kx, const KernelSpec& ky, const Dataset& d, const Eigen::VectorXd& w1,
             const Eigen::VectorXd& w2);

/// (1/n) sum_j hscic_at(W_j), the average over the observed Z_j.
MeasureResult avg_hscic(const KernelSpec& kx, const KernelSpec& ky, const Dataset& d, const SmoothingSpec& s);

/// (1/n) sum_j gcdcov_at(W_j).
MeasureResult gcdcov_avg(const SemimetricSpec& rx, const SemimetricSpec& ry, const Dataset& d,
                         const SmoothingSpec& s);

/// (1/n^2) sum_jj' k_Z(Z_j, Z_j') h_hat(W_j, W_j').
MeasureResult hscic_vstat(const KernelSpec& kx, const KernelSpec& ky, const KernelSpec& kz, const Dataset& d,
                          const SmoothingSpec& s);

/// Regularized trace estimator of the conditional cross-covariance HS norm, X augmented by Z.
MeasureResult hscic_trace(const KernelSpec& kx, const KernelSpec& ky, const KernelSpec& kz, const Dataset& d,
                          const RegularizationSpec& reg);

/// Checks |w| = n, entries finite and >= 0, sum within 1e-8 of 1.
void validate_weights(const Eigen::VectorXd& w, Eigen::Index n, std::string_view what = "weights");

}  // namespace cimeter
