#pragma once

#include "cimeter/dataset.hpp"
#include "cimeter/rng.hpp"

#include <algorithm>
#include <cmath>

namespace testing {

inline double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline cimeter::PointSet normal_points(std::uint64_t seed, Eigen::Index n, Eigen::Index dim) {
  cimeter::CounterRng rng(seed, 99);
  cimeter::PointSet m(n, dim);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

inline cimeter::PointSet column(std::initializer_list<double> values) {
  cimeter::PointSet m(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (const double v : values) m(i++, 0) = v;
  return m;
}

inline Eigen::VectorXd unit(Eigen::Index n, Eigen::Index k) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  e[k] = 1.0;
  return e;
}

}  // namespace testing
