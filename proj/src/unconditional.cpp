#include "cimeter/unconditional.hpp"

#include "cimeter/detail/weighted_forms.hpp"
#include "cimeter/errors.hpp"

#include <string>

namespace cimeter {

namespace {

void require_finite(const PointSet& m, const char* what) {
  if (!m.allFinite()) throw InputError(std::string(what) + " contains NaN or Inf");
}

Eigen::VectorXd uniform_weights(Eigen::Index n) {
  return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

}  // namespace

void PairedSample::validate() const {
  if (x.rows() != y.rows()) {
    throw InputError("paired sample row mismatch: X has " + std::to_string(x.rows()) + " rows, Y has " +
                     std::to_string(y.rows()));
  }
  if (x.rows() < 1) throw InputError("paired sample is empty");
  require_finite(x, "X");
  require_finite(y, "Y");
}

MeasureResult mmd_squared(const KernelSpec& k, const PointSet& sample_p, const PointSet& sample_q) {
  if (sample_p.rows() == 0 || sample_q.rows() == 0) throw InputError("mmd_squared needs two nonempty samples");
  if (sample_p.cols() != sample_q.cols()) throw InputError("mmd_squared samples differ in dimension");
  require_finite(sample_p, "sample P");
  require_finite(sample_q, "sample Q");

  PointSet pooled(sample_p.rows() + sample_q.rows(), sample_p.cols());
  pooled << sample_p, sample_q;
  const KernelSpec resolved = resolve(k, pooled);

  const double m = static_cast<double>(sample_p.rows());
  const double n = static_cast<double>(sample_q.rows());
  const double pp = gram_matrix(resolved, sample_p).entries.sum() / (m * m);
  const double qq = gram_matrix(resolved, sample_q).entries.sum() / (n * n);
  const double pq = cross_gram(resolved, sample_p, sample_q).sum() / (m * n);

  MeasureResult out;
  out.estimator = "mmd_squared";
  out.n = sample_p.rows() + sample_q.rows();
  out.params["kernel"] = to_string(resolved);
  out.params["n_p"] = static_cast<std::int64_t>(sample_p.rows());
  out.params["n_q"] = static_cast<std::int64_t>(sample_q.rows());
  out.value = clamp_squared(pp + qq - 2.0 * pq, "mmd_squared", &out.params);
  return out;
}

double hsic_expectation_form(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky) {
  return detail::weighted_dependence(kx, ky, uniform_weights(kx.rows()));
}

double hsic_trace_form(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky) {
  const Eigen::Index n = kx.rows();
  const double nn = static_cast<double>(n);
  Eigen::MatrixXd h0 = Eigen::MatrixXd::Identity(n, n);
  h0.array() -= 1.0 / nn;
  return (kx * h0 * ky * h0).trace() / (nn * nn);
}

MeasureResult hsic_v(const KernelSpec& kx, const KernelSpec& ky, const PairedSample& s) {
  s.validate();
  const GramMatrix gx = gram_matrix(kx, s.x);
  const GramMatrix gy = gram_matrix(ky, s.y);

  MeasureResult out;
  out.estimator = "hsic_v";
  out.n = s.x.rows();
  out.params["kernel_x"] = to_string(gx.spec);
  out.params["kernel_y"] = to_string(gy.spec);
  out.value = clamp_squared(hsic_expectation_form(gx.entries, gy.entries), "hsic_v", &out.params);
  return out;
}

MeasureResult dcov_v(const SemimetricSpec& rx, const SemimetricSpec& ry, const PairedSample& s) {
  s.validate();
  const DistanceMatrix dx = distance_matrix(rx, s.x);
  const DistanceMatrix dy = distance_matrix(ry, s.y);

  MeasureResult out;
  out.estimator = "dcov_v";
  out.n = s.x.rows();
  out.params["metric_x"] = to_string(dx.spec);
  out.params["metric_y"] = to_string(dy.spec);
  out.value = clamp_squared(detail::weighted_dependence(dx.entries, dy.entries, uniform_weights(out.n)),
                            "dcov_v", &out.params);
  return out;
}

}  // namespace cimeter
