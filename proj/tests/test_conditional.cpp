#include "cimeter/conditional.hpp"
#include "cimeter/errors.hpp"
#include "cimeter/oracles.hpp"
#include "cimeter/verify.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cimeter;
using testing::rel;
using testing::unit;

namespace {

const KernelSpec kGauss = KernelSpec::gaussian(1.0);

Dataset two_point() {
  Dataset d;
  d.x = testing::column({0, 1});
  d.y = testing::column({0, 1});
  d.z = testing::column({0, 5});
  return d;
}

Eigen::MatrixXd gram_of(const KernelSpec& k, const PointSet& p) { return gram_matrix(k, p).entries; }

}  // namespace

TEST_SUITE("conditional") {
  TEST_CASE("smoothing weight examples") {
    const SmoothingSpec gauss{SmoothingShape::gaussian, 0.5};
    const Eigen::VectorXd single = smoothing_weights(gauss, testing::column({3.0}), std::vector<double>{10.0});
    CHECK(single.size() == 1);
    CHECK(single[0] == 1.0);

    const PointSet z = testing::normal_points(1, 9, 2);
    const Eigen::VectorXd box = smoothing_weights({SmoothingShape::box, 100.0}, z, row_view(z, 0));
    CHECK((box.array() - 1.0 / 9.0).abs().maxCoeff() <= 1e-15);

    const PointSet zz = testing::normal_points(2, 50, 1);
    const double scale = median_heuristic(zz);
    const Eigen::VectorXd sharp = smoothing_weights({SmoothingShape::gaussian, 1e-3 * scale}, zz, row_view(zz, 0));
    CHECK(sharp[0] >= 0.999);
  }

  TEST_CASE("empty neighborhoods are errors, never silently uniform") {
    const PointSet z = testing::column({0, 1, 2});
    CHECK_THROWS_AS(smoothing_weights({SmoothingShape::box, 0.5}, z, std::vector<double>{10.0}),
                    EmptyNeighborhoodError);
    CHECK_THROWS_AS(smoothing_weights({SmoothingShape::gaussian, 1e-3}, z, std::vector<double>{10.0}),
                    EmptyNeighborhoodError);
    const PointSet eval = testing::column({0, 50, 1, 60});
    try {
      conditional_weights({SmoothingShape::epanechnikov, 2.0}, z, eval);
      FAIL("expected an error");
    } catch (const EmptyNeighborhoodError& e) {
      CHECK(e.rows() == std::vector<std::int64_t>{1, 3});
    }
  }

  TEST_CASE("smoothing profiles integrate to one") {
    for (const auto shape : {SmoothingShape::gaussian, SmoothingShape::epanechnikov, SmoothingShape::box}) {
      for (const Eigen::Index r : {1, 2, 3}) {
        // radial integral: c_r * surface(r) * int_0^inf K(u) u^(r-1) du
        const double surface = 2.0 * std::pow(std::numbers::pi, 0.5 * r) / std::tgamma(0.5 * r);
        const int steps = 600000;  // cell edges land on u = 1
        const double upper = 12.0;
        const double h = upper / steps;
        double integral = 0.0;
        for (int i = 0; i < steps; ++i) {
          const double u = (i + 0.5) * h;
          integral += smoothing_profile(shape, u) * std::pow(u, static_cast<double>(r - 1)) * h;
        }
        CHECK(smoothing_normalization(shape, r) * surface * integral == doctest::Approx(1.0).epsilon(1e-5));
      }
    }
  }

  TEST_CASE("weight matrices are row stochastic") {
    const PointSet z = testing::normal_points(3, 40, 2);
    for (const auto shape : {SmoothingShape::gaussian, SmoothingShape::epanechnikov, SmoothingShape::box}) {
      const auto w = conditional_weights({shape, std::nullopt}, z);
      CHECK((w.w.array() >= 0.0).all());
      CHECK((w.w.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
      CHECK(w.bandwidth == doctest::Approx(median_heuristic(z) * std::pow(40.0, -1.0 / 6.0)));
    }
    const auto exact = exact_match_weights(testing::column({0, 1, 0, 2, 1, 0}));
    CHECK(exact.w(0, 2) == doctest::Approx(1.0 / 3.0));
    CHECK(exact.w(3, 3) == 1.0);
    CHECK(exact.w(1, 0) == 0.0);
  }

  TEST_CASE("smoothing syntax") {
    CHECK(to_string(parse_smoothing_spec("box:0.25")) == "box:0.25");
    CHECK(parse_smoothing_spec("epanechnikov").shape == SmoothingShape::epanechnikov);
    CHECK_THROWS_AS(parse_smoothing_spec("triangle"), InputError);
    CHECK_THROWS_AS(parse_smoothing_spec("gaussian:-1"), InputError);
  }

  TEST_CASE("gcdcov_at examples") {
    const Dataset d = random_dataset(4, 10, 2, 2, 1);
    CHECK(gcdcov_at(SemimetricSpec::euclidean(), SemimetricSpec::euclidean(), d, unit(10, 0)).value <= 1e-12);
    Dataset c = d;
    c.y.setConstant(2.0);
    CHECK(gcdcov_at(SemimetricSpec::euclidean(), SemimetricSpec::euclidean(), c, random_weights(1, 10)).value <=
          1e-12);
    const Eigen::VectorXd half = Eigen::VectorXd::Constant(2, 0.5);
    CHECK(gcdcov_at(SemimetricSpec::euclidean(), SemimetricSpec::euclidean(), two_point(), half).value ==
          doctest::Approx(0.25).epsilon(1e-14));
  }

  TEST_CASE("weight validation") {
    const Dataset d = random_dataset(5, 6, 1, 1, 1);
    const auto rx = SemimetricSpec::euclidean();
    CHECK_THROWS_AS(gcdcov_at(rx, rx, d, Eigen::VectorXd::Constant(5, 0.2)), InputError);
    CHECK_THROWS_AS(gcdcov_at(rx, rx, d, Eigen::VectorXd::Constant(6, 0.2)), InputError);
    Eigen::VectorXd neg = Eigen::VectorXd::Constant(6, 0.25);
    neg[0] = -0.25;
    CHECK_THROWS_AS(hscic_at(kGauss, kGauss, d, neg), InputError);
    CHECK_NOTHROW(hscic_at(kGauss, kGauss, d, Eigen::VectorXd::Constant(6, 1.0 / 6.0)));
  }

  TEST_CASE("hscic_at examples and both directions of the distance/kernel identity") {
    const Dataset d = random_dataset(6, 20, 2, 3, 1);
    CHECK(hscic_at(kGauss, kGauss, d, unit(20, 3)).value <= 1e-12);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Eigen::VectorXd w = random_weights(100 + s, 20);
      for (const auto& rho : {SemimetricSpec::euclidean(), SemimetricSpec::euclidean_power(1.2)}) {
        const double g = gcdcov_at(rho, rho, d, w).value;
        const double h = hscic_at(distance_induced_kernel(rho, {1.0, 2.0}), distance_induced_kernel(rho, {0, 0, 3}),
                                  d, w)
                             .value;
        CHECK(std::abs(h - g) <= 1e-10 * (1.0 + std::abs(g)));
      }
      const KernelSpec kx = KernelSpec::laplacian(0.7);
      const KernelSpec ky = KernelSpec::gaussian(1.4);
      const double h = hscic_at(kx, ky, d, w).value;
      const double g = gcdcov_at(kernel_induced_semimetric(kx), kernel_induced_semimetric(ky), d, w).value;
      CHECK(std::abs(h - g) <= 1e-10 * (1.0 + std::abs(h)));
    }
  }

  TEST_CASE("anchor independence") {
    const Dataset d = random_dataset(7, 15, 2, 1, 1);
    const Eigen::VectorXd w = random_weights(8, 15);
    const auto rho = SemimetricSpec::euclidean();
    const double base = hscic_at(distance_induced_kernel(rho), distance_induced_kernel(rho), d, w).value;
    for (double a : {-3.0, 0.5, 10.0}) {
      const double v = hscic_at(distance_induced_kernel(rho, {a, -a}), distance_induced_kernel(rho, {2 * a}), d, w).value;
      CHECK(rel(v, base) <= 1e-10);
    }
  }

  TEST_CASE("h_hat examples") {
    const Dataset d = random_dataset(9, 12, 2, 2, 1);
    const Eigen::VectorXd w1 = random_weights(10, 12);
    const Eigen::VectorXd w2 = random_weights(11, 12);
    CHECK(rel(h_hat(kGauss, kGauss, d, w1, w1), hscic_at(kGauss, kGauss, d, w1).value) <= 1e-12);
    CHECK(std::abs(h_hat(kGauss, kGauss, d, unit(12, 4), w2)) <= 1e-14);
    CHECK(rel(h_hat(kGauss, kGauss, d, w1, w2), h_hat(kGauss, kGauss, d, w2, w1)) <= 1e-12);

    const auto k = distance_induced_kernel(SemimetricSpec::euclidean(), {0.4, -0.1});
    const Eigen::MatrixXd dx = distance_matrix(SemimetricSpec::euclidean(), d.x).entries;
    const Eigen::MatrixXd dy = distance_matrix(SemimetricSpec::euclidean(), d.y).entries;
    CHECK(rel(h_hat(k, k, d, w1, w2), signed_measure_form(dx, dy, w1, w2)) <= 1e-10);
    CHECK(h_hat(KernelSpec::laplacian(1.0), kGauss, d, w2, w2) >= 0.0);
  }

  TEST_CASE("avg_hscic examples") {
    Dataset d = random_dataset(12, 30, 2, 1, 1);
    Dataset c = d;
    c.y.setConstant(1.0);
    CHECK(avg_hscic(kGauss, kGauss, c, {}).value <= 1e-12);
    CHECK(avg_hscic(kGauss, kGauss, two_point(), {SmoothingShape::box, 0.1}).value == 0.0);

    const Dataset small = random_dataset(13, 10, 2, 2, 1);
    const SmoothingSpec s{SmoothingShape::gaussian, 0.6};
    const double fast = avg_hscic(kGauss, KernelSpec::laplacian(1.0), small, s).value;
    const double naive = naive_avg_hscic(gram_of(kGauss, small.x), gram_of(KernelSpec::laplacian(1.0), small.y),
                                         conditional_weights(s, small.z).w);
    CHECK(rel(fast, naive) <= 1e-10);
  }

  TEST_CASE("gcdcov_avg matches hscic with distance-induced kernels") {
    const Dataset d = random_dataset(14, 25, 1, 2, 2);
    const SmoothingSpec s{SmoothingShape::epanechnikov, 1.5};
    const auto rho = SemimetricSpec::euclidean();
    const double g = gcdcov_avg(rho, rho, d, s).value;
    const double h = avg_hscic(distance_induced_kernel(rho), distance_induced_kernel(rho), d, s).value;
    CHECK(rel(g, h) <= 1e-9);
  }

  TEST_CASE("hscic_vstat examples") {
    Dataset d = random_dataset(15, 20, 1, 1, 1);
    d.y.setConstant(0.0);
    CHECK(hscic_vstat(kGauss, kGauss, kGauss, d, {}).value <= 1e-12);

    GeneratorSpec spec;
    spec.model = GeneratorModel::discrete_z_mixture;
    spec.levels = 3;
    spec.n = 45;
    spec.seed = 3;
    const Dataset m = generate(spec);
    const double v = hscic_vstat(kGauss, kGauss, KernelSpec::dirac(), m, {}).value;
    CHECK(rel(v, stratified_hscic_vstat(gram_of(kGauss, m.x), gram_of(kGauss, m.y), m.z.col(0))) <= 1e-10);
    // a box of half-width 0.5 on integer labels is the same exact-match weighting
    const double boxed = hscic_vstat(kGauss, kGauss, KernelSpec::dirac(), m, {SmoothingShape::box, 0.5}).value;
    CHECK(rel(boxed, v) <= 1e-12);

    for (std::uint64_t s = 0; s < 4; ++s) {
      const Dataset r = random_dataset(20 + s, 8, 2, 1, 1);
      const SmoothingSpec sm{SmoothingShape::gaussian, 0.7};
      const Eigen::MatrixXd w = conditional_weights(sm, r.z).w;
      const Eigen::MatrixXd kx = gram_of(kGauss, r.x), ky = gram_of(kGauss, r.y), kz = gram_of(KernelSpec::laplacian(1.0), r.z);
      const double fast = hscic_vstat(kGauss, kGauss, KernelSpec::laplacian(1.0), r, sm).value;
      double pairwise = 0.0;
      for (Eigen::Index j = 0; j < 8; ++j) {
        for (Eigen::Index l = 0; l < 8; ++l) {
          pairwise += kz(j, l) * h_hat(kGauss, kGauss, r, w.row(j).transpose(), w.row(l).transpose());
        }
      }
      CHECK(rel(fast, pairwise / 64.0) <= 1e-9);
      CHECK(rel(fast, naive_hscic_vstat(kx, ky, kz, w)) <= 1e-9);
    }
  }

  TEST_CASE("hscic_trace examples") {
    const Dataset one = random_dataset(30, 1, 1, 1, 1);
    CHECK(hscic_trace(kGauss, kGauss, kGauss, one, {}).value == 0.0);

    const Dataset d = random_dataset(31, 20, 2, 1, 1);
    const Eigen::MatrixXd kx = gram_of(kGauss, d.x), ky = gram_of(kGauss, d.y), kz = gram_of(kGauss, d.z);
    // lambda -> infinity leaves Tr[Kxz~ (nH) Ky~ (nH)]
    const Eigen::Index n = d.n();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
    h.array() -= 1.0 / n;
    h /= static_cast<double>(n);
    const Eigen::MatrixXd nh = static_cast<double>(n) * h;
    const double limit = (kx.cwiseProduct(kz) * h * nh * ky * h * nh).trace();
    CHECK(rel(hscic_trace(kGauss, kGauss, kGauss, d, {1e12}).value, limit) <= 1e-4);

    for (const Eigen::Index size : {8, 16, 32}) {
      const Dataset r = random_dataset(40 + static_cast<std::uint64_t>(size), size, 2, 2, 1);
      const double t = hscic_trace(kGauss, kGauss, kGauss, r, {0.05}).value;
      CHECK(rel(t, operator_hs_oracle(kGauss, kGauss, kGauss, r, {0.05})) <= 1e-8);
    }
    CHECK_THROWS_AS(hscic_trace(kGauss, kGauss, kGauss, d, {0.0}), InputError);
    CHECK_THROWS_AS(hscic_trace(kGauss, kGauss, kGauss, d, {-1.0}), InputError);
    CHECK_THROWS_AS(gram::hscic_trace(kx, ky, kz, -1.0), InputError);
    const auto r = hscic_trace(KernelSpec::gaussian(), KernelSpec::gaussian(), KernelSpec::gaussian(), d, {});
    CHECK(std::get<double>(r.params.at("lambda")) == doctest::Approx(1e-3));
  }

  TEST_CASE("hscic_trace is invariant under row reordering") {
    const Dataset d = random_dataset(50, 30, 2, 2, 2);
    std::vector<Eigen::Index> order(30);
    for (Eigen::Index i = 0; i < 30; ++i) order[static_cast<std::size_t>(i)] = (7 * i + 3) % 30;
    const double a = hscic_trace(kGauss, kGauss, kGauss, d, {0.01}).value;
    const double b = hscic_trace(kGauss, kGauss, kGauss, d.reordered(order), {0.01}).value;
    CHECK(rel(a, b) <= 1e-10);
  }

  TEST_CASE("estimators are nonnegative on random data") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Dataset d = random_dataset(60 + s, 25, 1 + s % 3, 1 + s % 2, 1 + s % 2);
      CHECK(avg_hscic(KernelSpec::gaussian(), KernelSpec::gaussian(), d, {}).value >= 0.0);
      CHECK(hscic_vstat(KernelSpec::gaussian(), KernelSpec::gaussian(), KernelSpec::gaussian(), d, {}).value >= 0.0);
      CHECK(hscic_trace(KernelSpec::gaussian(), KernelSpec::gaussian(), KernelSpec::gaussian(), d, {}).value >= 0.0);
      for (Eigen::Index j = 0; j < 25; j += 6) {
        const Eigen::VectorXd w = random_weights(70 + s + 10 * static_cast<std::uint64_t>(j), 25);
        CHECK(h_hat(kGauss, kGauss, d, w, w) >= 0.0);
      }
    }
  }

  TEST_CASE("Dirac-limit trend of the Z-weighted statistic") {
    GeneratorSpec spec;
    spec.n = 1000;
    spec.seed = 21;
    const Dataset d = generate(spec);
    const Eigen::MatrixXd kx = gram_of(KernelSpec::gaussian(), d.x);
    const Eigen::MatrixXd ky = gram_of(KernelSpec::gaussian(), d.y);
    const Eigen::MatrixXd w = dataset_weights(d, {}).w;
    const Eigen::MatrixXd h = gram::h_matrix(kx, ky, w);
    const Eigen::VectorXd pointwise = gram::pointwise_hscic(kx, ky, w);
    double target = 0.0;
    for (Eigen::Index j = 0; j < d.n(); ++j) {
      const double z = d.z(j, 0);
      target += pointwise[j] * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
    }
    target /= static_cast<double>(d.n());
    double previous = INFINITY;
    for (const double t : {1.0, 0.5, 0.25, 0.125}) {
      const Eigen::MatrixXd kz = gram_of(KernelSpec::gaussian(t), d.z) / std::sqrt(2.0 * std::numbers::pi * t * t);
      const double gap = std::abs(gram::vstat_from_h(kz, h) - target);
      CHECK(gap < previous);
      previous = gap;
    }
  }
}
