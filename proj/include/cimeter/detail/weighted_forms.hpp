#pragma once

#include <Eigen/Core>

namespace cimeter::detail {

// Bilinear dependence forms under weighted empirical laws. With a = K_X, b = K_Y these are
// RKHS inner products of embedded signed measures; with a = D_X, b = D_Y they are the
// distance-covariance expansions. Weights are assumed normalized.

/// w'(a o b)w - 2 w'[(a w) o (b w)] + (w'a w)(w'b w)
inline double weighted_dependence(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& w) {
  const Eigen::VectorXd aw = a * w;
  const Eigen::VectorXd bw = b * w;
  const double joint = w.dot(a.cwiseProduct(b) * w);
  const double cross = w.dot(aw.cwiseProduct(bw));
  return joint - 2.0 * cross + w.dot(aw) * w.dot(bw);
}

/// w1'(a o b)w2 - w1'[(a w2) o (b w2)] - w2'[(a w1) o (b w1)] + (w1'a w2)(w1'b w2)
inline double weighted_cross_dependence(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                        const Eigen::VectorXd& w1, const Eigen::VectorXd& w2) {
  const Eigen::VectorXd aw1 = a * w1;
  const Eigen::VectorXd bw1 = b * w1;
  const Eigen::VectorXd aw2 = a * w2;
  const Eigen::VectorXd bw2 = b * w2;
  return w1.dot(a.cwiseProduct(b) * w2) - w1.dot(aw2.cwiseProduct(bw2)) - w2.dot(aw1.cwiseProduct(bw1)) +
         w1.dot(aw2) * w1.dot(bw2);
}

}  // namespace cimeter::detail
