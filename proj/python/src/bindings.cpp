#include "cimeter/citest.hpp"
#include "cimeter/conditional.hpp"
#include "cimeter/dataset.hpp"
#include "cimeter/errors.hpp"
#include "cimeter/oracles.hpp"
#include "cimeter/unconditional.hpp"
#include "cimeter/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace cimeter;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// 1-D arrays are a single column.
PointSet to_points(const Array& a, const char* what) {
  if (a.ndim() == 1) {
    PointSet m(a.shape(0), 1);
    for (py::ssize_t i = 0; i < a.shape(0); ++i) m(i, 0) = a.at(i);
    return m;
  }
  if (a.ndim() != 2) throw InputError(std::string(what) + " must be a 1-D or 2-D array");
  PointSet m(a.shape(0), a.shape(1));
  std::copy(a.data(), a.data() + a.size(), m.data());
  return m;
}

Dataset make_dataset(const Array& x, const Array& y, const std::optional<Array>& z, bool z_discrete) {
  Dataset d;
  d.x = to_points(x, "x");
  d.y = to_points(y, "y");
  d.z = z ? to_points(*z, "z") : PointSet::Zero(d.x.rows(), 1);
  d.z_discrete = z_discrete;
  d.validate();
  return d;
}

py::dict result_dict(const MeasureResult& r) {
  py::dict params;
  for (const auto& [key, value] : r.params) {
    std::visit([&](const auto& v) { params[py::str(key)] = v; }, value);
  }
  py::dict out;
  out["value"] = r.value;
  out["estimator"] = r.estimator;
  out["n"] = r.n;
  out["params"] = params;
  return out;
}

SmoothingSpec smoothing(const std::string& text, std::optional<double> bandwidth) {
  SmoothingSpec s = parse_smoothing_spec(text);
  if (bandwidth) s.bandwidth = *bandwidth;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Kernel and distance measures of (conditional) dependence";

  static py::exception<InputError> input_error(m, "InputError", PyExc_ValueError);
  static py::exception<NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InputError& e) {
      py::set_error(input_error, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical_error, e.what());
    }
  });

  m.def(
      "gram_matrix",
      [](const std::string& kernel, const Array& points) {
        return gram_matrix(parse_kernel_spec(kernel), to_points(points, "points")).entries;
      },
      py::arg("kernel"), py::arg("points"));
  m.def(
      "distance_matrix",
      [](const std::string& metric, const Array& points) {
        return distance_matrix(parse_semimetric_spec(metric), to_points(points, "points")).entries;
      },
      py::arg("metric"), py::arg("points"));

  m.def(
      "hsic_v",
      [](const Array& x, const Array& y, const std::string& kx, const std::string& ky) {
        return result_dict(hsic_v(parse_kernel_spec(kx), parse_kernel_spec(ky), {to_points(x, "x"), to_points(y, "y")}));
      },
      py::arg("x"), py::arg("y"), py::arg("kernel_x") = "gaussian", py::arg("kernel_y") = "gaussian");
  m.def(
      "dcov_v",
      [](const Array& x, const Array& y, const std::string& rx, const std::string& ry) {
        return result_dict(
            dcov_v(parse_semimetric_spec(rx), parse_semimetric_spec(ry), {to_points(x, "x"), to_points(y, "y")}));
      },
      py::arg("x"), py::arg("y"), py::arg("metric_x") = "euclidean", py::arg("metric_y") = "euclidean");
  m.def(
      "mmd_squared",
      [](const Array& p, const Array& q, const std::string& k) {
        return result_dict(mmd_squared(parse_kernel_spec(k), to_points(p, "p"), to_points(q, "q")));
      },
      py::arg("p"), py::arg("q"), py::arg("kernel") = "gaussian");

  m.def(
      "hscic_at",
      [](const Array& x, const Array& y, const Eigen::VectorXd& w, const std::string& kx, const std::string& ky) {
        return result_dict(
            hscic_at(parse_kernel_spec(kx), parse_kernel_spec(ky), make_dataset(x, y, std::nullopt, false), w));
      },
      py::arg("x"), py::arg("y"), py::arg("weights"), py::arg("kernel_x") = "gaussian",
      py::arg("kernel_y") = "gaussian");
  m.def(
      "gcdcov_at",
      [](const Array& x, const Array& y, const Eigen::VectorXd& w, const std::string& rx, const std::string& ry) {
        return result_dict(gcdcov_at(parse_semimetric_spec(rx), parse_semimetric_spec(ry),
                                     make_dataset(x, y, std::nullopt, false), w));
      },
      py::arg("x"), py::arg("y"), py::arg("weights"), py::arg("metric_x") = "euclidean",
      py::arg("metric_y") = "euclidean");
  m.def(
      "h_hat",
      [](const Array& x, const Array& y, const Eigen::VectorXd& w1, const Eigen::VectorXd& w2, const std::string& kx,
         const std::string& ky) {
        return h_hat(parse_kernel_spec(kx), parse_kernel_spec(ky), make_dataset(x, y, std::nullopt, false), w1, w2);
      },
      py::arg("x"), py::arg("y"), py::arg("w1"), py::arg("w2"), py::arg("kernel_x") = "gaussian",
      py::arg("kernel_y") = "gaussian");

  m.def(
      "conditional_weights",
      [](const Array& z, const std::string& s, std::optional<double> t) {
        return conditional_weights(smoothing(s, t), to_points(z, "z")).w;
      },
      py::arg("z"), py::arg("smoothing") = "gaussian", py::arg("bandwidth") = py::none());

  m.def(
      "avg_hscic",
      [](const Array& x, const Array& y, const Array& z, const std::string& kx, const std::string& ky,
         const std::string& s, std::optional<double> t, bool z_discrete) {
        return result_dict(avg_hscic(parse_kernel_spec(kx), parse_kernel_spec(ky), make_dataset(x, y, z, z_discrete),
                                     smoothing(s, t)));
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("kernel_x") = "gaussian", py::arg("kernel_y") = "gaussian",
      py::arg("smoothing") = "gaussian", py::arg("bandwidth") = py::none(), py::arg("z_discrete") = false);
  m.def(
      "gcdcov_avg",
      [](const Array& x, const Array& y, const Array& z, const std::string& rx, const std::string& ry,
         const std::string& s, std::optional<double> t, bool z_discrete) {
        return result_dict(gcdcov_avg(parse_semimetric_spec(rx), parse_semimetric_spec(ry),
                                      make_dataset(x, y, z, z_discrete), smoothing(s, t)));
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("metric_x") = "euclidean", py::arg("metric_y") = "euclidean",
      py::arg("smoothing") = "gaussian", py::arg("bandwidth") = py::none(), py::arg("z_discrete") = false);
  m.def(
      "hscic_vstat",
      [](const Array& x, const Array& y, const Array& z, const std::string& kx, const std::string& ky,
         const std::string& kz, const std::string& s, std::optional<double> t, bool z_discrete) {
        return result_dict(hscic_vstat(parse_kernel_spec(kx), parse_kernel_spec(ky), parse_kernel_spec(kz),
                                       make_dataset(x, y, z, z_discrete), smoothing(s, t)));
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("kernel_x") = "gaussian", py::arg("kernel_y") = "gaussian",
      py::arg("kernel_z") = "gaussian", py::arg("smoothing") = "gaussian", py::arg("bandwidth") = py::none(),
      py::arg("z_discrete") = false);
  m.def(
      "hscic_trace",
      [](const Array& x, const Array& y, const Array& z, const std::string& kx, const std::string& ky,
         const std::string& kz, std::optional<double> lam) {
        return result_dict(hscic_trace(parse_kernel_spec(kx), parse_kernel_spec(ky), parse_kernel_spec(kz),
                                       make_dataset(x, y, z, false), RegularizationSpec{lam}));
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("kernel_x") = "gaussian", py::arg("kernel_y") = "gaussian",
      py::arg("kernel_z") = "gaussian", py::arg("lam") = py::none());

  m.def(
      "local_permutation_test",
      [](const Array& x, const Array& y, const Array& z, const std::string& statistic, int B, Eigen::Index knn,
         double alpha, std::uint64_t seed, bool z_discrete) {
        TestConfig cfg;
        cfg.statistic = parse_statistic(statistic);
        cfg.B = B;
        cfg.knn = knn;
        cfg.alpha = alpha;
        cfg.seed = seed;
        const TestReport r = local_permutation_test(cfg, make_dataset(x, y, z, z_discrete));
        py::dict out;
        out["statistic"] = r.statistic;
        out["statistic_value"] = r.statistic_value;
        out["p_value"] = r.p_value;
        out["reject"] = r.reject;
        out["B"] = r.B;
        out["seed"] = r.seed;
        out["scheme"] = r.scheme;
        out["replicate_values"] = r.replicate_values;
        return out;
      },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("statistic") = "hscic_trace", py::arg("B") = 200,
      py::arg("knn") = 10, py::arg("alpha") = 0.05, py::arg("seed") = 0, py::arg("z_discrete") = false);

  m.def(
      "generate",
      [](const std::string& model, Eigen::Index n, Eigen::Index p, Eigen::Index q, Eigen::Index r, std::uint64_t seed,
         double coupling, int levels) {
        GeneratorSpec spec;
        spec.model = parse_generator_model(model);
        spec.n = n;
        spec.p = p;
        spec.q = q;
        spec.r = r;
        spec.seed = seed;
        spec.coupling = coupling;
        spec.levels = levels;
        const Dataset d = generate(spec);
        py::dict out;
        out["x"] = Eigen::MatrixXd(d.x);
        out["y"] = Eigen::MatrixXd(d.y);
        out["z"] = Eigen::MatrixXd(d.z);
        out["z_discrete"] = d.z_discrete;
        return out;
      },
      py::arg("model") = "gaussian_ci", py::arg("n") = 100, py::arg("p") = 1, py::arg("q") = 1, py::arg("r") = 1,
      py::arg("seed") = 0, py::arg("coupling") = 0.0, py::arg("levels") = 3);

  m.def(
      "verify",
      [](std::uint64_t seed) {
        const VerifyReport r = run_identity_suite({seed, false});
        py::list checks;
        for (const auto& c : r.checks) {
          py::dict item;
          item["name"] = c.name;
          item["passed"] = c.passed;
          item["max_deviation"] = c.max_deviation;
          item["tolerance"] = c.tolerance;
          item["cases"] = c.cases;
          checks.append(item);
        }
        return checks;
      },
      py::arg("seed") = 0);

  m.def("cp_constant", &cp_constant, py::arg("p"));
  m.def(
      "operator_hs_oracle",
      [](const Eigen::MatrixXd& kx, const Eigen::MatrixXd& ky, const Eigen::MatrixXd& kz, double lam) {
        return operator_hs_oracle(kx, ky, kz, lam);
      },
      py::arg("kx"), py::arg("ky"), py::arg("kz"), py::arg("lam"));
}
