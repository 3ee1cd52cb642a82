#include "cimeter/errors.hpp"
#include "cimeter/geometry.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace cimeter;
using testing::normal_points;

namespace {

std::vector<double> pt(std::initializer_list<double> v) { return v; }

double k_at(const KernelSpec& k, std::vector<double> a, std::vector<double> b) { return eval_kernel(k, a, b); }
double rho_at(const SemimetricSpec& r, std::vector<double> a, std::vector<double> b) {
  return eval_semimetric(r, a, b);
}

std::vector<KernelSpec> sample_kernels() {
  return {KernelSpec::gaussian(0.8),
          KernelSpec::gaussian(),
          KernelSpec::laplacian(1.5),
          distance_induced_kernel(SemimetricSpec::euclidean()),
          distance_induced_kernel(SemimetricSpec::euclidean_power(1.3), {0.5, -1.0}),
          distance_induced_kernel(SemimetricSpec::kernel_induced(KernelSpec::gaussian(1.0)), {1.0, 1.0}),
          KernelSpec::product(KernelSpec::gaussian(1.0), KernelSpec::laplacian(2.0), 1)};
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("semimetric examples") {
    CHECK(rho_at(SemimetricSpec::euclidean(), pt({0, 0}), pt({3, 4})) == doctest::Approx(5.0).epsilon(1e-15));
    const auto induced = SemimetricSpec::kernel_induced(KernelSpec::gaussian(1.0));
    CHECK(rho_at(induced, pt({0}), pt({0})) == 0.0);
    CHECK(rho_at(induced, pt({0}), pt({1})) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-15));
    CHECK(rho_at(SemimetricSpec::euclidean_power(2.0), pt({1, 1}), pt({2, 3})) == doctest::Approx(5.0));
  }

  TEST_CASE("kernel examples") {
    const auto dist = distance_induced_kernel(SemimetricSpec::euclidean(), {0.0});
    CHECK(k_at(dist, pt({2}), pt({3})) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(k_at(KernelSpec::gaussian(1.0), pt({0.3, -2}), pt({0.3, -2})) == 1.0);
    // labels u = 0, v = 1
    CHECK(k_at(KernelSpec::dirac(), pt({0}), pt({1})) == 0.0);
    CHECK(k_at(KernelSpec::dirac(), pt({0}), pt({0})) == 1.0);
    CHECK(k_at(KernelSpec::laplacian(2.0), pt({0}), pt({1})) == doctest::Approx(std::exp(-0.5)));
    const auto prod = KernelSpec::product(KernelSpec::gaussian(1.0), KernelSpec::dirac(), 1);
    CHECK(k_at(prod, pt({0, 1}), pt({1, 1})) == doctest::Approx(std::exp(-0.5)));
    CHECK(k_at(prod, pt({0, 1}), pt({1, 2})) == 0.0);
  }

  TEST_CASE("distance-induced kernel on the line from the origin") {
    const auto k = distance_induced_kernel(SemimetricSpec::euclidean());
    const PointSet x = normal_points(1, 20, 1);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.rows(); ++j) {
        const double a = x(i, 0), b = x(j, 0);
        CHECK(eval_kernel(k, row_view(x, i), row_view(x, j)) ==
              doctest::Approx(std::abs(a) + std::abs(b) - std::abs(a - b)).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("distance-induced kernel vanishes against the anchor") {
    const std::vector<double> anchor{0.7, -1.2};
    const PointSet x = normal_points(2, 15, 2);
    for (const auto& rho : {SemimetricSpec::euclidean(), SemimetricSpec::euclidean_power(0.7),
                            SemimetricSpec::kernel_induced(KernelSpec::laplacian(1.0))}) {
      const auto k = distance_induced_kernel(rho, anchor);
      CHECK(eval_kernel(k, anchor, anchor) == 0.0);
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        CHECK(eval_kernel(k, anchor, row_view(x, i)) == 0.0);
        CHECK(eval_kernel(k, row_view(x, i), row_view(x, i)) ==
              doctest::Approx(2.0 * eval_semimetric(rho, row_view(x, i), anchor)).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("distance -> kernel -> distance round trip") {
    const PointSet x = normal_points(3, 30, 3);
    for (const auto& rho : {SemimetricSpec::euclidean(), SemimetricSpec::euclidean_power(1.5),
                            SemimetricSpec::kernel_induced(KernelSpec::gaussian(2.0))}) {
      const auto back = kernel_induced_semimetric(distance_induced_kernel(rho, {0.1, 0.2, 0.3}));
      for (Eigen::Index i = 0; i + 1 < x.rows(); ++i) {
        const double a = eval_semimetric(rho, row_view(x, i), row_view(x, i + 1));
        const double b = eval_semimetric(back, row_view(x, i), row_view(x, i + 1));
        CHECK(std::abs(a - b) <= 1e-12);
      }
    }
  }

  TEST_CASE("kernel-induced semimetric") {
    const auto rho = kernel_induced_semimetric(KernelSpec::gaussian(1.0));
    CHECK(rho_at(rho, pt({0}), pt({1})) == doctest::Approx(1.0 - std::exp(-0.5)));
    const PointSet x = normal_points(4, 20, 2);
    for (const auto& k : sample_kernels()) {
      const auto r = kernel_induced_semimetric(resolve(k, x));
      CHECK(rho_at(r, pt({0.4, 2.0}), pt({0.4, 2.0})) == 0.0);
      const auto check = check_negative_type(r, x, 50, 5);
      CHECK(check.negative_type);
    }
  }

  TEST_CASE("gram matrices") {
    const PointSet x = normal_points(5, 7, 2);
    const GramMatrix g = gram_matrix(KernelSpec::gaussian(), x);
    CHECK((g.entries.diagonal().array() == 1.0).all());
    CHECK(is_resolved(g.spec));

    const PointSet one = testing::column({2.5});
    const auto k = distance_induced_kernel(SemimetricSpec::euclidean());
    const GramMatrix g1 = gram_matrix(k, one);
    REQUIRE(g1.entries.rows() == 1);
    CHECK(g1.entries(0, 0) == doctest::Approx(5.0));

    const PointSet three = normal_points(6, 3, 2);
    for (const auto& spec : sample_kernels()) {
      const GramMatrix gm = gram_matrix(spec, three);
      CHECK(gm.entries == gm.entries.transpose());
      for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) {
          CHECK(gm.entries(i, j) ==
                doctest::Approx(eval_kernel(gm.spec, row_view(three, i), row_view(three, j))).epsilon(1e-12));
        }
      }
    }
    CHECK_THROWS_AS(gram_matrix(KernelSpec::gaussian(), PointSet(0, 2)), InputError);
  }

  TEST_CASE("distance matrices") {
    const DistanceMatrix d1 = distance_matrix(SemimetricSpec::euclidean(), testing::column({4.0}));
    CHECK(d1.entries.rows() == 1);
    CHECK(d1.entries(0, 0) == 0.0);

    const DistanceMatrix d = distance_matrix(SemimetricSpec::euclidean(), testing::column({0, 1, 3}));
    Eigen::MatrixXd expected(3, 3);
    expected << 0, 1, 3, 1, 0, 2, 3, 2, 0;
    CHECK(d.entries.isApprox(expected, 1e-15));

    const PointSet x = normal_points(7, 9, 3);
    for (const auto& rho : {SemimetricSpec::euclidean(), SemimetricSpec::euclidean_power(0.5),
                            SemimetricSpec::kernel_induced(KernelSpec::laplacian(1.0))}) {
      const DistanceMatrix dm = distance_matrix(rho, x);
      CHECK((dm.entries.diagonal().array() == 0.0).all());
      CHECK((dm.entries.array() >= 0.0).all());
      CHECK(dm.entries == dm.entries.transpose());
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.rows(); ++j) {
          CHECK(dm.entries(i, j) ==
                doctest::Approx(eval_semimetric(rho, row_view(x, i), row_view(x, j))).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("negative-type checks") {
    CHECK(check_negative_type(SemimetricSpec::euclidean(), normal_points(8, 20, 2), 50, 1).negative_type);
    CHECK(check_negative_type(SemimetricSpec::euclidean_power(2.0), normal_points(9, 12, 3), 50, 2).negative_type);

    // |x - x'|^3 is not of negative type: some small point set and weight vector exposes it.
    bool violated = false;
    for (std::uint64_t s = 0; s < 20 && !violated; ++s) {
      const PointSet x = normal_points(100 + s, 4, 1);
      Eigen::MatrixXd table(4, 4);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) table(i, j) = std::pow(std::abs(x(i, 0) - x(j, 0)), 3.0);
      }
      const auto result = check_negative_type(table, 50, s);
      violated = !result.negative_type && result.worst > 0.0;
    }
    CHECK(violated);

    CHECK_THROWS_AS(check_negative_type(SemimetricSpec::euclidean(), testing::column({1.0}), 5, 0), InputError);
  }

  TEST_CASE("Gram matrices are PSD for every kernel family") {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const PointSet x = normal_points(200 + s, 25, 2);
      for (const auto& spec : sample_kernels()) CHECK(is_psd(gram_matrix(spec, x).entries));
      PointSet labels(25, 1);
      for (Eigen::Index i = 0; i < 25; ++i) labels(i, 0) = static_cast<double>(i % 4);
      CHECK(is_psd(gram_matrix(KernelSpec::dirac(), labels).entries));
    }
  }

  TEST_CASE("input errors") {
    CHECK_THROWS_AS(eval_semimetric(SemimetricSpec::euclidean(), pt({1, 2}), pt({1})), InputError);
    CHECK_THROWS_AS(eval_kernel(KernelSpec::gaussian(1.0), pt({1, 2}), pt({1})), InputError);
    CHECK_THROWS_AS(SemimetricSpec::euclidean_power(2.5), InputError);
    CHECK_THROWS_AS(SemimetricSpec::euclidean_power(0.0), InputError);
    CHECK_THROWS_AS(KernelSpec::gaussian(-1.0), InputError);
    CHECK_THROWS_AS(parse_kernel_spec("cosine"), InputError);
    CHECK_THROWS_AS(parse_semimetric_spec("manhattan"), InputError);
  }

  TEST_CASE("text syntax round trip") {
    for (const char* text : {"gaussian", "gaussian:1.5", "laplacian:0.25", "dirac", "distance:euclidean",
                             "distance:euclidean^1.5@1,-2", "distance:kernel:gaussian:2@0"}) {
      CHECK(to_string(parse_kernel_spec(text)) == text);
    }
    CHECK(to_string(parse_kernel_spec("distance")) == "distance:euclidean");
    CHECK(to_string(parse_kernel_spec("distance@3")) == "distance:euclidean@3");
    for (const char* text : {"euclidean", "euclidean^0.5", "kernel:laplacian:2"}) {
      CHECK(to_string(parse_semimetric_spec(text)) == text);
    }
  }

  TEST_CASE("median heuristic") {
    CHECK(median_heuristic(testing::column({0, 1, 3})) == doctest::Approx(2.0));
    CHECK(median_heuristic(testing::column({0, 1, 3, 7})) == doctest::Approx(3.5));
    CHECK(median_heuristic(testing::column({2, 2})) == 1.0);
    const auto resolved = resolve(KernelSpec::gaussian(), testing::column({0, 1, 3}));
    CHECK(to_string(resolved) == "gaussian:2");
  }
}
