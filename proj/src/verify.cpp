#include "cimeter/verify.hpp"

#include "cimeter/conditional.hpp"
#include "cimeter/oracles.hpp"
#include "cimeter/rng.hpp"
#include "cimeter/unconditional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cimeter {

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.passed; });
}

double relative_deviation(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-14});
}

Dataset random_dataset(std::uint64_t seed, Eigen::Index n, Eigen::Index p, Eigen::Index q, Eigen::Index r) {
  const auto fill = [&](Eigen::Index cols, std::uint64_t stream) {
    CounterRng rng(seed, stream);
    PointSet m(n, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
  };
  Dataset d;
  d.x = fill(p, 0);
  d.y = fill(q, 1);
  d.z = fill(r, 2);
  return d;
}

Eigen::VectorXd random_weights(std::uint64_t seed, Eigen::Index n) {
  CounterRng rng(seed, 7);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = rng.uniform() < 0.25 ? 0.0 : rng.uniform();
  if (!(w.sum() > 0.0)) w[static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)))] = 1.0;
  return w / w.sum();
}

namespace {

class Tracker {
 public:
  Tracker(std::string name, double tolerance) {
    check_.name = std::move(name);
    check_.tolerance = tolerance;
  }
  void add(double deviation) {
    ++check_.cases;
    if (!(deviation <= check_.max_deviation)) check_.max_deviation = std::isnan(deviation) ? INFINITY : deviation;
  }
  IdentityCheck finish() {
    check_.passed = check_.cases > 0 && check_.max_deviation <= check_.tolerance;
    return check_;
  }

 private:
  IdentityCheck check_;
};

std::vector<double> random_anchor(CounterRng& rng, Eigen::Index dim) {
  std::vector<double> anchor(static_cast<std::size_t>(dim));
  for (auto& a : anchor) a = 2.0 * rng.normal();
  return anchor;
}

}  // namespace

VerifyReport run_identity_suite(const VerifyOptions& options) {
  VerifyReport report;
  report.seed = options.seed;
  const std::uint64_t seed = options.seed;
  const double fault = options.inject_fault ? -1.0 : 1.0;

  {
    Tracker fwd("distance_to_kernel_identity", 1e-8);
    Tracker rev("kernel_to_distance_identity", 1e-8);
    Tracker anchors("anchor_independence", 1e-10);
    for (std::uint64_t s = 0; s < 12; ++s) {
      CounterRng rng(derive_seed(seed, 100 + s), 0);
      const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng.below(36));
      const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.below(3));
      const Eigen::Index q = 1 + static_cast<Eigen::Index>(rng.below(3));
      const Dataset d = random_dataset(derive_seed(seed, 200 + s), n, p, q, 1 + static_cast<Eigen::Index>(rng.below(2)));
      const SemimetricSpec rx = s % 2 ? SemimetricSpec::euclidean_power(0.5 + rng.uniform()) : SemimetricSpec::euclidean();
      const SemimetricSpec ry = SemimetricSpec::euclidean();
      const KernelSpec gx = KernelSpec::gaussian(0.5 + rng.uniform());
      const KernelSpec gy = KernelSpec::laplacian(0.5 + rng.uniform());
      for (std::uint64_t k = 0; k < 3; ++k) {
        const Eigen::VectorXd w = random_weights(derive_seed(seed, 300 + 10 * s + k), n);
        const double g = fault * gcdcov_at(rx, ry, d, w).value;
        double first = 0.0;
        for (int a = 0; a < 3; ++a) {
          const KernelSpec kx = distance_induced_kernel(rx, random_anchor(rng, p));
          const KernelSpec ky = distance_induced_kernel(ry, random_anchor(rng, q));
          const double h = hscic_at(kx, ky, d, w).value;
          fwd.add(std::abs(h - g) / (1.0 + std::abs(g)));
          if (a == 0) first = h;
          anchors.add(relative_deviation(h, first));
        }
        const double hk = hscic_at(gx, gy, d, w).value;
        const double gk = gcdcov_at(kernel_induced_semimetric(gx), kernel_induced_semimetric(gy), d, w).value;
        rev.add(std::abs(hk - gk) / (1.0 + std::abs(hk)));
      }
    }
    report.checks.push_back(fwd.finish());
    report.checks.push_back(rev.finish());
    report.checks.push_back(anchors.finish());
  }

  {
    Tracker t("hsic_equals_dcov", 1e-8);
    Dataset two;
    two.x = PointSet{{0.0}, {1.0}};
    two.y = PointSet{{0.0}, {1.0}};
    const KernelSpec k0 = distance_induced_kernel(SemimetricSpec::euclidean());
    t.add(relative_deviation(hsic_v(k0, k0, two.paired()).value, 0.25));
    t.add(relative_deviation(dcov_v(SemimetricSpec::euclidean(), SemimetricSpec::euclidean(), two.paired()).value, 0.25));
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Dataset d = random_dataset(derive_seed(seed, 400 + s), 10 + 5 * static_cast<Eigen::Index>(s), 2, 3, 1);
      CounterRng rng(derive_seed(seed, 450 + s), 0);
      const double h = hsic_v(distance_induced_kernel(SemimetricSpec::euclidean(), random_anchor(rng, 2)),
                              distance_induced_kernel(SemimetricSpec::euclidean(), random_anchor(rng, 3)), d.paired())
                           .value;
      t.add(relative_deviation(h, dcov_v(SemimetricSpec::euclidean(), SemimetricSpec::euclidean(), d.paired()).value));
    }
    report.checks.push_back(t.finish());
  }

  {
    Tracker expansion("vstat_pairwise_h_expansion", 1e-9);
    Tracker naive("vstat_naive_sextuple_sum", 1e-9);
    Tracker avg("avg_hscic_naive_quadruple_sum", 1e-10);
    for (std::uint64_t s = 0; s < 6; ++s) {
      const Eigen::Index n = 4 + static_cast<Eigen::Index>(s % 5);
      const Dataset d = random_dataset(derive_seed(seed, 500 + s), n, 2, 1, 1);
      const Eigen::MatrixXd kx = gram_matrix(KernelSpec::gaussian(1.0), d.x).entries;
      const Eigen::MatrixXd ky = gram_matrix(KernelSpec::gaussian(0.7), d.y).entries;
      const Eigen::MatrixXd kz = gram_matrix(KernelSpec::gaussian(1.3), d.z).entries;
      const Eigen::MatrixXd w = conditional_weights(SmoothingSpec{SmoothingShape::gaussian, 0.8}, d.z).w;
      const double fast = gram::vstat_from_h(kz, gram::h_matrix(kx, ky, w));
      double pairwise = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index l = 0; l < n; ++l) {
          pairwise += kz(j, l) * gram::h_hat(kx, ky, w.row(j).transpose(), w.row(l).transpose());
        }
      }
      pairwise /= static_cast<double>(n * n);
      expansion.add(relative_deviation(fast, pairwise));
      naive.add(relative_deviation(fast, naive_hscic_vstat(kx, ky, kz, w)));
      avg.add(relative_deviation(gram::pointwise_hscic(kx, ky, w).mean(), naive_avg_hscic(kx, ky, w)));
    }
    report.checks.push_back(expansion.finish());
    report.checks.push_back(naive.finish());
    report.checks.push_back(avg.finish());
  }

  {
    Tracker t("trace_formula_operator_oracle", 1e-8);
    const double lambdas[] = {1e-4, 1e-2, 1.0};
    const Eigen::Index sizes[] = {8, 16, 32};
    for (std::uint64_t s = 0; s < 3; ++s) {
      const Dataset d = random_dataset(derive_seed(seed, 600 + s), sizes[s], 1 + s % 2, 1, 1 + s % 2);
      const Eigen::MatrixXd kx = gram_matrix(KernelSpec::gaussian(), d.x).entries;
      const Eigen::MatrixXd ky = gram_matrix(KernelSpec::gaussian(), d.y).entries;
      const Eigen::MatrixXd kz = gram_matrix(KernelSpec::gaussian(), d.z).entries;
      for (const double lambda : lambdas) {
        t.add(relative_deviation(gram::hscic_trace(kx, ky, kz, lambda), operator_hs_oracle(kx, ky, kz, lambda)));
      }
    }
    report.checks.push_back(t.finish());
  }

  {
    Tracker t("h_signed_measure_form", 1e-10);
    for (std::uint64_t s = 0; s < 4; ++s) {
      const Eigen::Index n = 6 + static_cast<Eigen::Index>(s);
      const Dataset d = random_dataset(derive_seed(seed, 700 + s), n, 2, 2, 1);
      const Eigen::VectorXd w1 = random_weights(derive_seed(seed, 710 + s), n);
      const Eigen::VectorXd w2 = random_weights(derive_seed(seed, 720 + s), n);
      const KernelSpec k = distance_induced_kernel(SemimetricSpec::euclidean(), {0.3, -0.2});
      const Eigen::MatrixXd dx = distance_matrix(SemimetricSpec::euclidean(), d.x).entries;
      const Eigen::MatrixXd dy = distance_matrix(SemimetricSpec::euclidean(), d.y).entries;
      t.add(relative_deviation(h_hat(k, k, d, w1, w2), signed_measure_form(dx, dy, w1, w2)));
    }
    report.checks.push_back(t.finish());
  }

  {
    Tracker t("cf_quadrature_h", 1e-3);
    for (std::uint64_t s = 0; s < 2; ++s) {
      const Eigen::Index n = 4 + static_cast<Eigen::Index>(s);
      const Dataset d = random_dataset(derive_seed(seed, 800 + s), n, 1, 1, 1);
      const Eigen::VectorXd w1 = random_weights(derive_seed(seed, 810 + s), n);
      const Eigen::VectorXd w2 = s == 0 ? w1 : random_weights(derive_seed(seed, 820 + s), n);
      const KernelSpec k = distance_induced_kernel(SemimetricSpec::euclidean());
      t.add(relative_deviation(h_hat(k, k, d, w1, w2), cf_h_oracle(d, w1, w2)));
    }
    report.checks.push_back(t.finish());
  }

  {
    Tracker t("weight_identity_abs_error", 1e-4);
    const QuadratureGrid grid{1e4, 65536, 1e-6};
    for (const double x : {0.5, 1.0, 2.0}) t.add(std::abs(weight_identity_check(x, grid) - x));
    report.checks.push_back(t.finish());

    Tracker c("cp_constant", 1e-12);
    c.add(relative_deviation(cp_constant(1), std::numbers::pi));
    c.add(relative_deviation(cp_constant(2), 2.0 * std::numbers::pi));
    c.add(relative_deviation(cp_constant(3), std::numbers::pi * std::numbers::pi));
    report.checks.push_back(c.finish());
  }

  {
    Tracker t("dirac_stratified_vstat", 1e-10);
    for (std::uint64_t s = 0; s < 3; ++s) {
      GeneratorSpec spec;
      spec.model = GeneratorModel::discrete_z_mixture;
      spec.levels = 2 + static_cast<int>(s);
      spec.n = 30 + 10 * static_cast<Eigen::Index>(s);
      spec.seed = derive_seed(seed, 900 + s);
      const Dataset d = generate(spec);
      const KernelSpec k = KernelSpec::gaussian();
      const double v = hscic_vstat(k, k, KernelSpec::dirac(), d, {}).value;
      const Eigen::MatrixXd kx = gram_matrix(k, d.x).entries;
      const Eigen::MatrixXd ky = gram_matrix(k, d.y).entries;
      t.add(relative_deviation(v, stratified_hscic_vstat(kx, ky, d.z.col(0))));
    }
    report.checks.push_back(t.finish());
  }

  return report;
}

}  // namespace cimeter
