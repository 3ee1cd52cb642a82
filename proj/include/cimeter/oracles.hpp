#pragma once

#include "cimeter/conditional.hpp"
#include "cimeter/dataset.hpp"

namespace cimeter {

// Brute-force and quadrature validators. None of these call into the estimator
// implementations; they share only Gram/distance matrix construction.

/// Log-spaced panels on [singularity_cutoff, half_width] per half-axis. Integrals use product
/// integration: the 1/t^2 factor is linear on each panel, the oscillating factor is exact.
struct QuadratureGrid {
  double half_width = 1e4;
  Eigen::Index points_per_axis = 2048;
  double singularity_cutoff = 1e-6;

  void validate() const;
};

/// pi^((p+1)/2) / Gamma((p+1)/2)
double cp_constant(int p);

/// Quadrature of (1 - cos(t x)) / (pi t^2) over eps <= |t| <= T; approximates |x|.
/// Refining nested grids decreases the value monotonically toward the truncated integral.
double weight_identity_check(double x, const QuadratureGrid& grid);

/// Weighted-L2 inner product, weight 1/(pi^2 t^2 s^2), of the weighted empirical
/// joint-minus-product characteristic functions for w1 and w2, by the tensor-product rule
/// applied to each frequency pair of the expanded integrand. Univariate X and Y only.
double cf_h_oracle(const Dataset& d, const Eigen::VectorXd& w1, const Eigen::VectorXd& w2,
                   const QuadratureGrid& grid = {});

/// Squared HS norm of the regularized conditional cross-covariance, assembled from
/// explicit feature coordinates K = Phi Phi' (eigendecomposition). n <= 256.
double operator_hs_oracle(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& kz,
                          double lambda);
double operator_hs_oracle(const KernelSpec& kx, const KernelSpec& ky, const KernelSpec& kz, const Dataset& d,
                          const RegularizationSpec& reg);

inline constexpr Eigen::Index kOperatorOracleMaxN = 256;
inline constexpr Eigen::Index kNaiveAvgMaxN = 16;
inline constexpr Eigen::Index kNaiveVstatMaxN = 8;
inline constexpr Eigen::Index kSignedMeasureMaxN = 32;

/// sum_{ab,cd} M1(a,b) M2(c,d) Dx(a,c) Dy(b,d) with M(a,b) = [a=b] w_a - w_a w_b:
/// the double integral of the pair kernels against the two signed measures. n <= 32.
double signed_measure_form(const Eigen::MatrixXd& dx, const Eigen::MatrixXd& dy, const Eigen::VectorXd& w1,
                           const Eigen::VectorXd& w2);

/// Literal quadruple sums of the averaged pointwise estimator. n <= 16.
double naive_avg_hscic(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& w);

/// Literal sextuple sums of the Z-kernel-weighted V-statistic. n <= 8.
double naive_hscic_vstat(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& kz,
                         const Eigen::MatrixXd& w);

/// sum over distinct labels z of p(z)^2 times the stratum's HSCIC with uniform weights.
double stratified_hscic_vstat(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::VectorXd& labels);

}  // namespace cimeter
