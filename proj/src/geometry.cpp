#include "cimeter/geometry.hpp"

#include "cimeter/errors.hpp"
#include "cimeter/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

namespace cimeter {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_same_dim(PointView a, PointView b) {
  if (a.size() != b.size()) {
    throw InputError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
}

double squared_distance(PointView a, PointView b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

double require_set(const std::optional<double>& value, const char* what) {
  if (!value) throw InputError(std::string(what) + " is unset; resolve the kernel against data first");
  return *value;
}

// Columns [begin, begin+count) of a point set as a new point set.
PointSet column_block(const PointSet& points, Eigen::Index begin, Eigen::Index count) {
  return points.middleCols(begin, count);
}

void require_split(const kernel::Product& p, Eigen::Index dim) {
  if (p.split < 1 || p.split >= dim) {
    throw InputError("product kernel split " + std::to_string(p.split) +
                     " is outside (0, " + std::to_string(dim) + ")");
  }
}

Eigen::MatrixXd squared_distance_matrix(const PointSet& points) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd d2(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d2(i, i) = 0.0;
    const PointView a = row_view(points, i);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = squared_distance(a, row_view(points, j));
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  return d2;
}

Eigen::VectorXd distances_to_anchor(const SemimetricSpec& rho, const PointSet& points,
                                    const std::vector<double>& anchor) {
  std::vector<double> origin;
  PointView theta;
  if (anchor.empty()) {
    origin.assign(static_cast<std::size_t>(points.cols()), 0.0);
    theta = origin;
  } else {
    theta = anchor;
  }
  Eigen::VectorXd r(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) r(i) = eval_semimetric(rho, row_view(points, i), theta);
  return r;
}

}  // namespace

SemimetricSpec SemimetricSpec::euclidean_power(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw InputError("euclidean power exponent must lie in (0, 2], got " + std::to_string(alpha));
  }
  return {semimetric::EuclideanPower{alpha}};
}

SemimetricSpec SemimetricSpec::kernel_induced(KernelSpec base) {
  return {semimetric::KernelInduced{std::make_shared<const KernelSpec>(std::move(base))}};
}

KernelSpec KernelSpec::gaussian(std::optional<double> bandwidth) {
  if (bandwidth && !(*bandwidth > 0.0)) throw InputError("gaussian bandwidth must be positive");
  return {kernel::Gaussian{bandwidth}};
}

KernelSpec KernelSpec::laplacian(std::optional<double> scale) {
  if (scale && !(*scale > 0.0)) throw InputError("laplacian scale must be positive");
  return {kernel::Laplacian{scale}};
}

KernelSpec KernelSpec::product(KernelSpec left, KernelSpec right, Eigen::Index split) {
  if (split < 1) throw InputError("product kernel split must be at least 1");
  return {kernel::Product{std::make_shared<const KernelSpec>(std::move(left)),
                          std::make_shared<const KernelSpec>(std::move(right)), split}};
}

double eval_semimetric(const SemimetricSpec& spec, PointView a, PointView b) {
  require_same_dim(a, b);
  return std::visit(
      overloaded{
          [&](const semimetric::Euclidean&) { return std::sqrt(squared_distance(a, b)); },
          [&](const semimetric::EuclideanPower& s) {
            const double d2 = squared_distance(a, b);
            return s.alpha == 2.0 ? d2 : std::pow(d2, 0.5 * s.alpha);
          },
          [&](const semimetric::KernelInduced& s) {
            const double v = 0.5 * (eval_kernel(*s.base, a, a) + eval_kernel(*s.base, b, b)) -
                             eval_kernel(*s.base, a, b);
            return std::max(0.0, v);
          },
      },
      spec.variant);
}

double eval_kernel(const KernelSpec& spec, PointView a, PointView b) {
  require_same_dim(a, b);
  return std::visit(
      overloaded{
          [&](const kernel::Gaussian& k) {
            const double bw = require_set(k.bandwidth, "gaussian bandwidth");
            return std::exp(-squared_distance(a, b) / (2.0 * bw * bw));
          },
          [&](const kernel::Laplacian& k) {
            const double scale = require_set(k.scale, "laplacian scale");
            return std::exp(-std::sqrt(squared_distance(a, b)) / scale);
          },
          [&](const kernel::DistanceInduced& k) {
            std::vector<double> origin;
            PointView theta = k.anchor;
            if (k.anchor.empty()) {
              origin.assign(a.size(), 0.0);
              theta = origin;
            }
            require_same_dim(a, theta);
            return eval_semimetric(*k.base, a, theta) + eval_semimetric(*k.base, b, theta) -
                   eval_semimetric(*k.base, a, b);
          },
          [&](const kernel::DiracDiscrete&) { return std::equal(a.begin(), a.end(), b.begin()) ? 1.0 : 0.0; },
          [&](const kernel::Product& k) {
            require_split(k, static_cast<Eigen::Index>(a.size()));
            const auto s = static_cast<std::size_t>(k.split);
            return eval_kernel(*k.left, a.first(s), b.first(s)) *
                   eval_kernel(*k.right, a.subspan(s), b.subspan(s));
          },
      },
      spec.variant);
}

KernelSpec distance_induced_kernel(const SemimetricSpec& rho, std::vector<double> anchor) {
  return {kernel::DistanceInduced{std::make_shared<const SemimetricSpec>(rho), std::move(anchor)}};
}

SemimetricSpec kernel_induced_semimetric(const KernelSpec& k) { return SemimetricSpec::kernel_induced(k); }

double median_heuristic(const PointSet& points) {
  const Eigen::Index n = points.rows();
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = std::sqrt(squared_distance(row_view(points, i), row_view(points, j)));
      if (d > 0.0) distances.push_back(d);
    }
  }
  if (distances.empty()) return 1.0;
  const std::size_t mid = distances.size() / 2;
  std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(mid), distances.end());
  const double upper = distances[mid];
  if (distances.size() % 2 == 1) return upper;
  const double lower = *std::max_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

bool is_resolved(const KernelSpec& spec) {
  return std::visit(overloaded{
                        [](const kernel::Gaussian& k) { return k.bandwidth.has_value(); },
                        [](const kernel::Laplacian& k) { return k.scale.has_value(); },
                        [](const kernel::DistanceInduced& k) { return is_resolved(*k.base); },
                        [](const kernel::DiracDiscrete&) { return true; },
                        [](const kernel::Product& k) { return is_resolved(*k.left) && is_resolved(*k.right); },
                    },
                    spec.variant);
}

bool is_resolved(const SemimetricSpec& spec) {
  if (const auto* s = std::get_if<semimetric::KernelInduced>(&spec.variant)) return is_resolved(*s->base);
  return true;
}

KernelSpec resolve(const KernelSpec& spec, const PointSet& points) {
  return std::visit(
      overloaded{
          [&](const kernel::Gaussian& k) {
            return k.bandwidth ? spec : KernelSpec::gaussian(median_heuristic(points));
          },
          [&](const kernel::Laplacian& k) {
            return k.scale ? spec : KernelSpec::laplacian(median_heuristic(points));
          },
          [&](const kernel::DistanceInduced& k) {
            return KernelSpec{kernel::DistanceInduced{
                std::make_shared<const SemimetricSpec>(resolve(*k.base, points)), k.anchor}};
          },
          [&](const kernel::DiracDiscrete&) { return spec; },
          [&](const kernel::Product& k) {
            require_split(k, points.cols());
            return KernelSpec::product(resolve(*k.left, column_block(points, 0, k.split)),
                                       resolve(*k.right, column_block(points, k.split, points.cols() - k.split)),
                                       k.split);
          },
      },
      spec.variant);
}

SemimetricSpec resolve(const SemimetricSpec& spec, const PointSet& points) {
  if (const auto* s = std::get_if<semimetric::KernelInduced>(&spec.variant)) {
    return SemimetricSpec::kernel_induced(resolve(*s->base, points));
  }
  return spec;
}

GramMatrix gram_matrix(const KernelSpec& spec, const PointSet& points) {
  if (points.rows() == 0) throw InputError("gram_matrix needs at least one point");
  KernelSpec resolved = resolve(spec, points);
  const Eigen::Index n = points.rows();

  Eigen::MatrixXd g = std::visit(
      overloaded{
          [&](const kernel::Gaussian& k) -> Eigen::MatrixXd {
            const double bw = *k.bandwidth;
            return (-squared_distance_matrix(points) / (2.0 * bw * bw)).array().exp().matrix();
          },
          [&](const kernel::Laplacian& k) -> Eigen::MatrixXd {
            return (-squared_distance_matrix(points).array().sqrt() / *k.scale).exp().matrix();
          },
          [&](const kernel::DistanceInduced& k) -> Eigen::MatrixXd {
            if (!k.anchor.empty() && static_cast<Eigen::Index>(k.anchor.size()) != points.cols()) {
              throw InputError("anchor dimension " + std::to_string(k.anchor.size()) +
                               " does not match points of dimension " + std::to_string(points.cols()));
            }
            const Eigen::MatrixXd d = distance_matrix(*k.base, points).entries;
            const Eigen::VectorXd r = distances_to_anchor(*k.base, points, k.anchor);
            Eigen::MatrixXd out(n, n);
            for (Eigen::Index j = 0; j < n; ++j) {
              for (Eigen::Index i = 0; i <= j; ++i) {
                const double v = r(i) + r(j) - d(i, j);
                out(i, j) = v;
                out(j, i) = v;
              }
            }
            return out;
          },
          [&](const kernel::DiracDiscrete&) -> Eigen::MatrixXd {
            Eigen::MatrixXd out(n, n);
            for (Eigen::Index j = 0; j < n; ++j) {
              for (Eigen::Index i = 0; i <= j; ++i) {
                const double v = eval_kernel(resolved, row_view(points, i), row_view(points, j));
                out(i, j) = v;
                out(j, i) = v;
              }
            }
            return out;
          },
          [&](const kernel::Product& k) -> Eigen::MatrixXd {
            const auto left = gram_matrix(*k.left, column_block(points, 0, k.split)).entries;
            const auto right = gram_matrix(*k.right, column_block(points, k.split, points.cols() - k.split)).entries;
            return left.cwiseProduct(right);
          },
      },
      resolved.variant);
  return {std::move(g), std::move(resolved)};
}

DistanceMatrix distance_matrix(const SemimetricSpec& spec, const PointSet& points) {
  if (points.rows() == 0) throw InputError("distance_matrix needs at least one point");
  SemimetricSpec resolved = resolve(spec, points);
  const Eigen::Index n = points.rows();

  Eigen::MatrixXd d = std::visit(
      overloaded{
          [&](const semimetric::Euclidean&) -> Eigen::MatrixXd {
            return squared_distance_matrix(points).array().sqrt().matrix();
          },
          [&](const semimetric::EuclideanPower& s) -> Eigen::MatrixXd {
            const Eigen::MatrixXd d2 = squared_distance_matrix(points);
            if (s.alpha == 2.0) return d2;
            return d2.array().pow(0.5 * s.alpha).matrix();
          },
          [&](const semimetric::KernelInduced& s) -> Eigen::MatrixXd {
            const Eigen::MatrixXd g = gram_matrix(*s.base, points).entries;
            Eigen::MatrixXd out(n, n);
            for (Eigen::Index j = 0; j < n; ++j) {
              out(j, j) = 0.0;
              for (Eigen::Index i = 0; i < j; ++i) {
                const double v = std::max(0.0, 0.5 * (g(i, i) + g(j, j)) - g(i, j));
                out(i, j) = v;
                out(j, i) = v;
              }
            }
            return out;
          },
      },
      resolved.variant);
  d.diagonal().setZero();
  return {std::move(d), std::move(resolved)};
}

Eigen::MatrixXd cross_gram(const KernelSpec& spec, const PointSet& p, const PointSet& q) {
  if (p.cols() != q.cols()) {
    throw InputError("dimension mismatch: " + std::to_string(p.cols()) + " vs " + std::to_string(q.cols()));
  }
  if (!is_resolved(spec)) throw InputError("cross_gram requires a resolved kernel spec");
  Eigen::MatrixXd out(p.rows(), q.rows());
  for (Eigen::Index j = 0; j < q.rows(); ++j) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) out(i, j) = eval_kernel(spec, row_view(p, i), row_view(q, j));
  }
  return out;
}

NegativeTypeCheck check_negative_type(const Eigen::MatrixXd& table, int trials, std::uint64_t seed) {
  const Eigen::Index n = table.rows();
  if (n < 2 || table.cols() != n) throw InputError("negative-type check needs a square table over at least 2 points");
  if (trials < 1) throw InputError("negative-type check needs at least one trial");

  CounterRng rng(seed, 0x6e74);
  double worst = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd alpha(n);
  for (int t = 0; t < trials; ++t) {
    double norm = 0.0;
    do {
      for (Eigen::Index i = 0; i < n; ++i) alpha(i) = rng.normal();
      alpha.array() -= alpha.mean();
      norm = alpha.norm();
    } while (norm == 0.0);
    alpha /= norm;
    worst = std::max(worst, alpha.dot(table * alpha));
  }
  const double tol = 1e-10 * std::max(1.0, table.cwiseAbs().maxCoeff());
  return {worst <= tol, worst};
}

NegativeTypeCheck check_negative_type(const SemimetricSpec& spec, const PointSet& points, int trials,
                                      std::uint64_t seed) {
  if (points.rows() < 2) throw InputError("negative-type check needs at least 2 points");
  return check_negative_type(distance_matrix(spec, points).entries, trials, seed);
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool is_psd(const Eigen::MatrixXd& symmetric, double rel_tol) {
  return min_eigenvalue(symmetric) >= -rel_tol * std::abs(symmetric.trace());
}

}  // namespace cimeter
