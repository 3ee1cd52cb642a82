#include "cimeter/conditional.hpp"

#include "cimeter/detail/weighted_forms.hpp"
#include "cimeter/errors.hpp"

#include <cmath>
#include <string>

namespace cimeter {

namespace gram {

namespace {

/// K H with H = (I - 11'/n)/n: subtract row means, scale by 1/n.
Eigen::MatrixXd right_center(const Eigen::MatrixXd& k) {
  const double n = static_cast<double>(k.rows());
  return (k.colwise() - k.rowwise().mean()) / n;
}

/// H X: subtract column means, scale by 1/n.
Eigen::MatrixXd left_center(const Eigen::MatrixXd& x) {
  const double n = static_cast<double>(x.rows());
  return (x.rowwise() - x.colwise().mean()) / n;
}

/// M = nH - (Kz~ + lambda I)^-1 Kz~
Eigen::MatrixXd trace_middle(const Eigen::MatrixXd& kz, double lambda) {
  const Eigen::Index n = kz.rows();
  const Eigen::MatrixXd kz_c = right_center(kz);
  Eigen::MatrixXd shifted = kz_c;
  shifted.diagonal().array() += lambda;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
  if (!(lu.rcond() > 1e-15)) throw NumericalError("regularized Z system is numerically singular; increase lambda");
  Eigen::MatrixXd m = -lu.solve(kz_c);
  m.diagonal().array() += 1.0;
  m.array() -= 1.0 / static_cast<double>(n);
  if (!m.allFinite()) throw NumericalError("regularized Z solve produced non-finite values");
  return m;
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InputError("lambda must be positive and finite, got " + std::to_string(lambda));
  }
}

}  // namespace

double hscic_at(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::VectorXd& w) {
  return detail::weighted_dependence(kx, ky, w);
}

double h_hat(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::VectorXd& w1,
             const Eigen::VectorXd& w2) {
  return detail::weighted_cross_dependence(kx, ky, w1, w2);
}

Eigen::VectorXd pointwise_hscic(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& w) {
  // Row j of W K is (K W_j)' by symmetry of K.
  const Eigen::MatrixXd a = w * kx;
  const Eigen::MatrixXd b = w * ky;
  const Eigen::MatrixXd c = w * kx.cwiseProduct(ky);
  const Eigen::VectorXd joint = c.cwiseProduct(w).rowwise().sum();
  const Eigen::VectorXd cross = w.cwiseProduct(a).cwiseProduct(b).rowwise().sum();
  const Eigen::VectorXd mx = w.cwiseProduct(a).rowwise().sum();
  const Eigen::VectorXd my = w.cwiseProduct(b).rowwise().sum();
  return joint - 2.0 * cross + mx.cwiseProduct(my);
}

Eigen::MatrixXd h_matrix(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd wt = w.transpose();
  const Eigen::MatrixXd joint = w * (kx.cwiseProduct(ky) * wt);
  const Eigen::MatrixXd a = kx * wt;  // column j' is K_X W_j'
  const Eigen::MatrixXd b = ky * wt;
  const Eigen::MatrixXd cross = w * a.cwiseProduct(b);  // (j, j') -> W_j'[(K_X W_j') o (K_Y W_j')]
  const Eigen::MatrixXd mx = w * a;
  const Eigen::MatrixXd my = w * b;
  Eigen::MatrixXd h = joint - cross - cross.transpose() + mx.cwiseProduct(my);
  return h;
}

double vstat_from_h(const Eigen::MatrixXd& kz, const Eigen::MatrixXd& h) {
  const double n = static_cast<double>(h.rows());
  return kz.cwiseProduct(h).sum() / (n * n);
}

double default_lambda(const Eigen::MatrixXd& kz) {
  const double lambda = 1e-3 * kz.diagonal().mean();
  if (!(lambda > 0.0)) throw InputError("default lambda is not positive (K_Z has a zero diagonal); set lambda explicitly");
  return lambda;
}

double hscic_trace(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& kz, double lambda) {
  check_lambda(lambda);
  if (kx.rows() <= 1) return 0.0;
  const Eigen::MatrixXd m = trace_middle(kz, lambda);
  const Eigen::MatrixXd p = right_center(kx.cwiseProduct(kz)) * m;
  const Eigen::MatrixXd q = right_center(ky) * m;
  return p.transpose().cwiseProduct(q).sum();
}

Eigen::MatrixXd trace_sandwich(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& kz, double lambda) {
  check_lambda(lambda);
  const Eigen::Index n = kx.rows();
  if (n <= 1) return Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd m = trace_middle(kz, lambda);
  return left_center(m) * (right_center(kx.cwiseProduct(kz)) * m);
}

}  // namespace gram

void validate_weights(const Eigen::VectorXd& w, Eigen::Index n, std::string_view what) {
  const std::string name(what);
  if (w.size() != n) {
    throw InputError(name + " have length " + std::to_string(w.size()) + ", dataset has " + std::to_string(n) +
                     " rows");
  }
  if (!w.allFinite()) throw InputError(name + " contain NaN or Inf");
  if ((w.array() < 0.0).any()) throw InputError(name + " contain negative entries");
  if (std::abs(w.sum() - 1.0) > 1e-8) throw InputError(name + " do not sum to 1 (sum " + std::to_string(w.sum()) + ")");
}

namespace {

void require_rows(const Dataset& d, Eigen::Index minimum, const char* what) {
  d.validate();
  if (d.n() < minimum) {
    throw InputError(std::string(what) + " needs n >= " + std::to_string(minimum) + ", got " + std::to_string(d.n()));
  }
}

double clamped_mean(const Eigen::VectorXd& values, const char* what) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    total += clamp_squared(values[j], std::string(what) + " at eval row " + std::to_string(j));
  }
  return total / static_cast<double>(values.size());
}

void record_weights(ParamMap& params, const ConditionalWeightMatrix& w) {
  params["smoothing"] = w.scheme;
  if (w.scheme != "exact_match") params["bandwidth_t"] = w.bandwidth;
}

}  // namespace

MeasureResult gcdcov_at(const SemimetricSpec& rx, const SemimetricSpec& ry, const Dataset& d,
                        const Eigen::VectorXd& w) {
  require_rows(d, 1, "gcdcov_at");
  validate_weights(w, d.n());
  const DistanceMatrix dx = distance_matrix(rx, d.x);
  const DistanceMatrix dy = distance_matrix(ry, d.y);
  MeasureResult out;
  out.estimator = "gcdcov_at";
  out.n = d.n();
  out.params["metric_x"] = to_string(dx.spec);
  out.params["metric_y"] = to_string(dy.spec);
  out.value = clamp_squared(detail::weighted_dependence(dx.entries, dy.entries, w), "gcdcov_at", &out.params);
  return out;
}

MeasureResult hscic_at(const KernelSpec& kx, const KernelSpec& ky, const Dataset& d, const Eigen::VectorXd& w) {
  require_rows(d, 1, "hscic_at");
  validate_weights(w, d.n());
  const GramMatrix gx = gram_matrix(kx, d.x);
  const GramMatrix gy = gram_matrix(ky, d.y);
  MeasureResult out;
  out.estimator = "hscic_at";
  out.n = d.n();
  out.params["kernel_x"] = to_string(gx.spec);
  out.params["kernel_y"] = to_string(gy.spec);
  out.value = clamp_squared(gram::hscic_at(gx.entries, gy.entries, w), "hscic_at", &out.params);
  return out;
}

double h_hat(const KernelSpec& kx, const KernelSpec& ky, const Dataset& d, const Eigen::VectorXd& w1,
             const Eigen::VectorXd& w2) {
  require_rows(d, 1, "h_hat");
  validate_weights(w1, d.n(), "first weights");
  validate_weights(w2, d.n(), "second weights");
  return gram::h_hat(gram_matrix(kx, d.x).entries, gram_matrix(ky, d.y).entries, w1, w2);
}

MeasureResult avg_hscic(const KernelSpec& kx, const KernelSpec& ky, const Dataset& d, const SmoothingSpec& s) {
  require_rows(d, 2, "avg_hscic");
  const GramMatrix gx = gram_matrix(kx, d.x);
  const GramMatrix gy = gram_matrix(ky, d.y);
  const ConditionalWeightMatrix w = dataset_weights(d, s);
  MeasureResult out;
  out.estimator = "avg_hscic";
  out.n = d.n();
  out.params["kernel_x"] = to_string(gx.spec);
  out.params["kernel_y"] = to_string(gy.spec);
  record_weights(out.params, w);
  out.value = clamped_mean(gram::pointwise_hscic(gx.entries, gy.entries, w.w), "hscic_at");
  return out;
}

MeasureResult gcdcov_avg(const SemimetricSpec& rx, const SemimetricSpec& ry, const Dataset& d,
                         const SmoothingSpec& s) {
  require_rows(d, 2, "gcdcov_avg");
  const DistanceMatrix dx = distance_matrix(rx, d.x);
  const DistanceMatrix dy = distance_matrix(ry, d.y);
  const ConditionalWeightMatrix w = dataset_weights(d, s);
  MeasureResult out;
  out.estimator = "gcdcov_avg";
  out.n = d.n();
  out.params["metric_x"] = to_string(dx.spec);
  out.params["metric_y"] = to_string(dy.spec);
  record_weights(out.params, w);
  out.value = clamped_mean(gram::pointwise_hscic(dx.entries, dy.entries, w.w), "gcdcov_at");
  return out;
}

MeasureResult hscic_vstat(const KernelSpec& kx, const KernelSpec& ky, const KernelSpec& kz, const Dataset& d,
                          const SmoothingSpec& s) {
  require_rows(d, 2, "hscic_vstat");
  const GramMatrix gx = gram_matrix(kx, d.x);
  const GramMatrix gy = gram_matrix(ky, d.y);
  const GramMatrix gz = gram_matrix(kz, d.z);
  const ConditionalWeightMatrix w = dataset_weights(d, s);
  MeasureResult out;
  out.estimator = "hscic_vstat";
  out.n = d.n();
  out.params["kernel_x"] = to_string(gx.spec);
  out.params["kernel_y"] = to_string(gy.spec);
  out.params["kernel_z"] = to_string(gz.spec);
  record_weights(out.params, w);
  const double raw = gram::vstat_from_h(gz.entries, gram::h_matrix(gx.entries, gy.entries, w.w));
  out.value = clamp_squared(raw, "hscic_vstat", &out.params);
  return out;
}

MeasureResult hscic_trace(const KernelSpec& kx, const KernelSpec& ky, const KernelSpec& kz, const Dataset& d,
                          const RegularizationSpec& reg) {
  require_rows(d, 1, "hscic_trace");
  if (reg.lambda && !(*reg.lambda > 0.0)) throw InputError("lambda must be positive");
  const GramMatrix gx = gram_matrix(kx, d.x);
  const GramMatrix gy = gram_matrix(ky, d.y);
  const GramMatrix gz = gram_matrix(kz, d.z);
  const double lambda = reg.lambda ? *reg.lambda : gram::default_lambda(gz.entries);
  MeasureResult out;
  out.estimator = "hscic_trace";
  out.n = d.n();
  out.params["kernel_x"] = to_string(gx.spec);
  out.params["kernel_y"] = to_string(gy.spec);
  out.params["kernel_z"] = to_string(gz.spec);
  out.params["lambda"] = lambda;
  out.value = clamp_squared(gram::hscic_trace(gx.entries, gy.entries, gz.entries, lambda), "hscic_trace",
                            &out.params);
  return out;
}

}  // namespace cimeter
