#pragma once

#include "cimeter/geometry.hpp"
#include "cimeter/measure.hpp"

namespace cimeter {

/// Row i of x and row i of y form the i-th observation.
struct PairedSample {
  PointSet x;
  PointSet y;

  /// Equal row counts, at least one row, finite entries.
  void validate() const;
};

/// Squared kernel distance between the empirical laws of two samples (V-statistic).
MeasureResult mmd_squared(const KernelSpec& k, const PointSet& sample_p, const PointSet& sample_q);

/// HSIC V-statistic: E k_X k_Y + E k_X E k_Y - 2 E[E' k_X E' k_Y] under the empirical law.
MeasureResult hsic_v(const KernelSpec& kx, const KernelSpec& ky, const PairedSample& s);

/// Distance covariance V-statistic with semimetrics in place of Euclidean norms.
MeasureResult dcov_v(const SemimetricSpec& rx, const SemimetricSpec& ry, const PairedSample& s);

/// HSIC expectation form on precomputed Gram matrices.
double hsic_expectation_form(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky);

/// (1/n^2) Tr(K_X H0 K_Y H0) with H0 = I - 11'/n.
double hsic_trace_form(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky);

}  // namespace cimeter
