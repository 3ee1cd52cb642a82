#include "cimeter/conditional.hpp"

#include "cimeter/errors.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace cimeter {

namespace {

constexpr double kThetaFloor = 1e-300;

double unit_ball_volume(Eigen::Index r) {
  const double half = 0.5 * static_cast<double>(r);
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

std::string format_point(PointView p) {
  std::ostringstream out;
  out.precision(6);
  out << '(';
  for (std::size_t i = 0; i < p.size(); ++i) out << (i ? ", " : "") << p[i];
  out << ')';
  return out.str();
}

/// Unnormalized theta_i for one query; returns the sum.
double fill_theta(const SmoothingSpec& spec, double t, const PointSet& z, PointView query, double* out) {
  const Eigen::Index r = z.cols();
  const double scale = smoothing_normalization(spec.shape, r) / std::pow(t, static_cast<double>(r));
  const Eigen::Map<const Eigen::RowVectorXd> q(query.data(), r);
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const double u = (z.row(i) - q).norm() / t;
    out[i] = scale * smoothing_profile(spec.shape, u);
    total += out[i];
  }
  return total;
}

double resolved_bandwidth(const SmoothingSpec& spec, const PointSet& z) {
  const double t = spec.bandwidth ? *spec.bandwidth : default_smoothing_bandwidth(z);
  if (!(t > 0.0) || !std::isfinite(t)) throw InputError("smoothing bandwidth must be positive and finite");
  return t;
}

}  // namespace

SmoothingSpec parse_smoothing_spec(std::string_view text) {
  SmoothingSpec spec;
  const auto colon = text.find(':');
  const auto name = text.substr(0, colon);
  if (name == "gaussian") {
    spec.shape = SmoothingShape::gaussian;
  } else if (name == "epanechnikov") {
    spec.shape = SmoothingShape::epanechnikov;
  } else if (name == "box") {
    spec.shape = SmoothingShape::box;
  } else {
    throw InputError("unknown smoothing shape '" + std::string(name) + "' (expected gaussian, epanechnikov or box)");
  }
  if (colon != std::string_view::npos) {
    const auto value = text.substr(colon + 1);
    double t = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), t);
    if (res.ec != std::errc{} || res.ptr != value.data() + value.size() || !(t > 0.0) || !std::isfinite(t)) {
      throw InputError("smoothing bandwidth must be a positive number, got '" + std::string(value) + "'");
    }
    spec.bandwidth = t;
  }
  return spec;
}

std::string to_string(const SmoothingSpec& spec) {
  std::string out;
  switch (spec.shape) {
    case SmoothingShape::gaussian: out = "gaussian"; break;
    case SmoothingShape::epanechnikov: out = "epanechnikov"; break;
    case SmoothingShape::box: out = "box"; break;
  }
  if (spec.bandwidth) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, *spec.bandwidth);
    out += ':' + std::string(buf, res.ptr);
  }
  return out;
}

double smoothing_normalization(SmoothingShape shape, Eigen::Index r) {
  if (r < 1) throw InputError("smoothing dimension must be >= 1");
  const double rr = static_cast<double>(r);
  switch (shape) {
    case SmoothingShape::gaussian: return std::pow(2.0 * std::numbers::pi, -0.5 * rr);
    case SmoothingShape::epanechnikov: return (rr + 2.0) / (2.0 * unit_ball_volume(r));
    case SmoothingShape::box: return 1.0 / unit_ball_volume(r);
  }
  return 0.0;
}

double smoothing_profile(SmoothingShape shape, double u) {
  switch (shape) {
    case SmoothingShape::gaussian: return std::exp(-0.5 * u * u);
    case SmoothingShape::epanechnikov: return u < 1.0 ? 1.0 - u * u : 0.0;
    case SmoothingShape::box: return u <= 1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double default_smoothing_bandwidth(const PointSet& z) {
  const double n = static_cast<double>(z.rows());
  const double r = static_cast<double>(z.cols());
  return median_heuristic(z) * std::pow(n, -1.0 / (4.0 + r));
}

Eigen::VectorXd smoothing_weights(const SmoothingSpec& spec, const PointSet& z, PointView query) {
  if (z.rows() < 1) throw InputError("smoothing needs at least one Z row");
  if (static_cast<Eigen::Index>(query.size()) != z.cols()) {
    throw InputError("smoothing query has dimension " + std::to_string(query.size()) + ", Z has " +
                     std::to_string(z.cols()));
  }
  const double t = resolved_bandwidth(spec, z);
  Eigen::VectorXd w(z.rows());
  const double theta = fill_theta(spec, t, z, query, w.data());
  if (!(theta >= kThetaFloor) || !std::isfinite(theta)) {
    throw EmptyNeighborhoodError("empty smoothing neighborhood at query " + format_point(query), {});
  }
  return w / theta;
}

ConditionalWeightMatrix conditional_weights(const SmoothingSpec& spec, const PointSet& z,
                                            const std::optional<PointSet>& eval_points) {
  if (z.rows() < 1) throw InputError("smoothing needs at least one Z row");
  const PointSet& eval = eval_points ? *eval_points : z;
  if (eval.cols() != z.cols()) throw InputError("eval points and Z differ in dimension");

  ConditionalWeightMatrix out;
  out.bandwidth = resolved_bandwidth(spec, z);
  out.scheme = to_string(SmoothingSpec{spec.shape, out.bandwidth});
  out.eval_points = eval;
  // row-major buffer so each eval point fills a contiguous row
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w(eval.rows(), z.rows());
  std::vector<std::int64_t> empty;
  for (Eigen::Index j = 0; j < eval.rows(); ++j) {
    const double theta = fill_theta(spec, out.bandwidth, z, row_view(eval, j), w.row(j).data());
    if (!(theta >= kThetaFloor) || !std::isfinite(theta)) {
      empty.push_back(j);
      continue;
    }
    w.row(j) /= theta;
  }
  if (!empty.empty()) {
    std::string rows;
    for (std::size_t k = 0; k < empty.size() && k < 10; ++k) rows += (k ? ", " : "") + std::to_string(empty[k]);
    if (empty.size() > 10) rows += ", ...";
    throw EmptyNeighborhoodError("empty smoothing neighborhood at eval rows [" + rows + "] (bandwidth " +
                                     std::to_string(out.bandwidth) + ")",
                                 std::move(empty));
  }
  out.w = w;
  return out;
}

ConditionalWeightMatrix exact_match_weights(const PointSet& z) {
  const Eigen::Index n = z.rows();
  if (n < 1) throw InputError("exact-match weights need at least one Z row");
  ConditionalWeightMatrix out;
  out.scheme = "exact_match";
  out.eval_points = z;
  out.w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (z.row(i) == z.row(j)) out.w(j, i) = 1.0;
    }
    out.w.row(j) /= out.w.row(j).sum();
  }
  return out;
}

ConditionalWeightMatrix dataset_weights(const Dataset& d, const SmoothingSpec& spec) {
  if (d.z_discrete && !spec.bandwidth) return exact_match_weights(d.z);
  return conditional_weights(spec, d.z);
}

}  // namespace cimeter
