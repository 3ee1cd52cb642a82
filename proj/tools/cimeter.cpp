// cimeter: dependence measures, conditional-independence tests and identity checks.
//
//   cimeter compute  --input data.csv --measure avg_hscic [--roles "x=a;y=b;z=c"] ...
//   cimeter test     --input data.csv [--measure hscic_trace] [--B 200] [--knn 10] ...
//   cimeter verify   [--seed N]
//   cimeter bench    [--repeats 3]
//   cimeter generate --model gaussian_ci --n 100 [--out data.csv]
//
// Exit codes: 0 ok, 1 verification failure, 2 input error, 3 numerical error.

#include "cimeter/bench.hpp"
#include "cimeter/citest.hpp"
#include "cimeter/conditional.hpp"
#include "cimeter/dataset.hpp"
#include "cimeter/errors.hpp"
#include "cimeter/unconditional.hpp"
#include "cimeter/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using nlohmann::ordered_json;
using namespace cimeter;

constexpr const char* kSchema = "cimeter/1";

enum class Format { json, csv };

struct Common {
  std::string input;
  std::string roles;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
};

struct Estimation {
  std::string measure;
  std::string kernel_x = "gaussian";
  std::string kernel_y = "gaussian";
  std::string kernel_z = "gaussian";
  std::string metric_x = "euclidean";
  std::string metric_y = "euclidean";
  std::string smoothing = "gaussian";
  std::optional<double> bandwidth;
  std::optional<double> lambda;
  Eigen::Index at_row = 0;
};

struct TestFlags {
  int B = 200;
  Eigen::Index knn = 10;
  double alpha = 0.05;
};

Format parse_format(const std::string& text) {
  if (text == "json") return Format::json;
  if (text == "csv") return Format::csv;
  throw InputError("--format must be json or csv, got '" + text + "'");
}

ordered_json to_json(const ParamMap& params) {
  ordered_json out = ordered_json::object();
  for (const auto& [key, value] : params) std::visit([&](const auto& v) { out[key] = v; }, value);
  return out;
}

std::string param_text(const ParamValue& value) {
  return std::visit(
      [](const auto& v) {
        std::ostringstream s;
        s.precision(17);
        s << v;
        return s.str();
      },
      value);
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out);
  if (!file) throw InputError("cannot write '" + out + "'");
  file << text;
}

Dataset load(const Common& c) {
  if (c.input.empty()) throw InputError("--input is required");
  std::optional<ColumnRoleMap> roles;
  if (!c.roles.empty()) roles = ColumnRoleMap::parse(c.roles);
  return load_csv(c.input, roles);
}

SmoothingSpec smoothing_of(const Estimation& e) {
  SmoothingSpec s = parse_smoothing_spec(e.smoothing);
  if (e.bandwidth) {
    if (!(*e.bandwidth > 0.0)) throw InputError("--bandwidth must be positive");
    s.bandwidth = *e.bandwidth;
  }
  return s;
}

ordered_json config_echo(const Common& c, const Estimation& e) {
  ordered_json cfg;
  cfg["input"] = c.input;
  cfg["roles"] = c.roles.empty() ? "from file" : c.roles;
  cfg["kernel_x"] = e.kernel_x;
  cfg["kernel_y"] = e.kernel_y;
  cfg["kernel_z"] = e.kernel_z;
  cfg["metric_x"] = e.metric_x;
  cfg["metric_y"] = e.metric_y;
  cfg["smoothing"] = e.smoothing;
  cfg["bandwidth"] = e.bandwidth ? ordered_json(*e.bandwidth) : ordered_json("default");
  cfg["lambda"] = e.lambda ? ordered_json(*e.lambda) : ordered_json("default");
  cfg["seed"] = c.seed;
  return cfg;
}

MeasureResult compute_measure(const Estimation& e, const Dataset& d) {
  const KernelSpec kx = parse_kernel_spec(e.kernel_x);
  const KernelSpec ky = parse_kernel_spec(e.kernel_y);
  const KernelSpec kz = parse_kernel_spec(e.kernel_z);
  const SemimetricSpec rx = parse_semimetric_spec(e.metric_x);
  const SemimetricSpec ry = parse_semimetric_spec(e.metric_y);
  const SmoothingSpec s = smoothing_of(e);
  const RegularizationSpec reg{e.lambda};

  const auto row_weights = [&] {
    if (e.at_row < 0 || e.at_row >= d.n()) {
      throw InputError("--at-row " + std::to_string(e.at_row) + " is outside [0, " + std::to_string(d.n()) + ")");
    }
    return Eigen::VectorXd(dataset_weights(d, s).w.row(e.at_row).transpose());
  };
  const auto with_row = [&](MeasureResult r) {
    r.params["at_row"] = static_cast<std::int64_t>(e.at_row);
    return r;
  };

  const std::string& m = e.measure;
  if (m == "dcov_v") return dcov_v(rx, ry, d.paired());
  if (m == "hsic_v") return hsic_v(kx, ky, d.paired());
  if (m == "gcdcov_at") return with_row(gcdcov_at(rx, ry, d, row_weights()));
  if (m == "hscic_at") return with_row(hscic_at(kx, ky, d, row_weights()));
  if (m == "avg_hscic") return avg_hscic(kx, ky, d, s);
  if (m == "gcdcov_avg") return gcdcov_avg(rx, ry, d, s);
  if (m == "hscic_vstat") return hscic_vstat(kx, ky, kz, d, s);
  if (m == "hscic_trace") return hscic_trace(kx, ky, kz, d, reg);
  throw InputError("unknown measure '" + m +
                   "' (expected dcov_v, hsic_v, gcdcov_at, hscic_at, avg_hscic, gcdcov_avg, hscic_vstat or hscic_trace)");
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

int cmd_compute(const Common& c, const Estimation& e) {
  const Format format = parse_format(c.format);
  const auto start = std::chrono::steady_clock::now();
  if (e.measure.empty()) throw InputError("--measure is required");
  const Dataset d = load(c);
  const MeasureResult r = compute_measure(e, d);
  const double runtime = elapsed_ms(start);

  if (format == Format::csv) {
    std::ostringstream s;
    s.precision(17);
    s << "key,value\nmeasure," << r.estimator << "\nvalue," << r.value << "\nn," << r.n << '\n';
    for (const auto& [key, value] : r.params) s << key << ',' << param_text(value) << '\n';
    emit(s.str(), c.out);
    return 0;
  }
  ordered_json doc;
  doc["schema"] = kSchema;
  doc["command"] = "compute";
  doc["measure"] = r.estimator;
  doc["value"] = r.value;
  doc["n"] = r.n;
  doc["params"] = to_json(r.params);
  doc["config"] = config_echo(c, e);
  doc["runtime_ms"] = runtime;
  emit(doc.dump(2) + "\n", c.out);
  return 0;
}

int cmd_test(const Common& c, const Estimation& e, const TestFlags& t) {
  const Format format = parse_format(c.format);
  const auto start = std::chrono::steady_clock::now();
  const Dataset d = load(c);

  TestConfig cfg;
  cfg.statistic = parse_statistic(e.measure.empty() ? "hscic_trace" : e.measure);
  cfg.B = t.B;
  cfg.knn = t.knn;
  cfg.alpha = t.alpha;
  cfg.seed = c.seed;
  cfg.kernel_x = parse_kernel_spec(e.kernel_x);
  cfg.kernel_y = parse_kernel_spec(e.kernel_y);
  cfg.kernel_z = parse_kernel_spec(e.kernel_z);
  cfg.metric_x = parse_semimetric_spec(e.metric_x);
  cfg.metric_y = parse_semimetric_spec(e.metric_y);
  cfg.smoothing = smoothing_of(e);
  cfg.regularization.lambda = e.lambda;
  const TestReport r = local_permutation_test(cfg, d);
  const double runtime = elapsed_ms(start);

  if (format == Format::csv) {
    std::ostringstream s;
    s.precision(17);
    s << "statistic,statistic_value,p_value,reject,alpha,B,knn,n,scheme,seed\n"
      << r.statistic << ',' << r.statistic_value << ',' << r.p_value << ',' << (r.reject ? 1 : 0) << ','
      << r.alpha << ',' << r.B << ',' << r.knn << ',' << r.n << ',' << r.scheme << ',' << r.seed << '\n';
    emit(s.str(), c.out);
    return 0;
  }
  ordered_json doc;
  doc["schema"] = kSchema;
  doc["command"] = "test";
  doc["statistic"] = r.statistic;
  doc["statistic_value"] = r.statistic_value;
  doc["p_value"] = r.p_value;
  doc["reject"] = r.reject;
  doc["alpha"] = r.alpha;
  doc["B"] = r.B;
  doc["knn"] = r.knn;
  doc["n"] = r.n;
  doc["scheme"] = r.scheme;
  doc["seed"] = r.seed;
  doc["params"] = to_json(r.params);
  doc["config"] = config_echo(c, e);
  doc["replicate_values"] = r.replicate_values;
  doc["runtime_ms"] = runtime;
  emit(doc.dump(2) + "\n", c.out);
  return 0;
}

int cmd_verify(const Common& c, bool inject_fault) {
  const Format format = parse_format(c.format);
  const auto start = std::chrono::steady_clock::now();
  const VerifyReport r = run_identity_suite({c.seed, inject_fault});
  const double runtime = elapsed_ms(start);

  if (format == Format::csv) {
    std::ostringstream s;
    s.precision(6);
    s << "identity,passed,max_deviation,tolerance,cases\n";
    for (const auto& k : r.checks) {
      s << k.name << ',' << (k.passed ? 1 : 0) << ',' << k.max_deviation << ',' << k.tolerance << ',' << k.cases
        << '\n';
    }
    emit(s.str(), c.out);
  } else {
    ordered_json doc;
    doc["schema"] = kSchema;
    doc["command"] = "verify";
    doc["seed"] = r.seed;
    doc["passed"] = r.all_passed();
    doc["checks"] = ordered_json::array();
    for (const auto& k : r.checks) {
      doc["checks"].push_back({{"name", k.name},
                               {"passed", k.passed},
                               {"max_deviation", k.max_deviation},
                               {"tolerance", k.tolerance},
                               {"cases", k.cases}});
    }
    doc["runtime_ms"] = runtime;
    emit(doc.dump(2) + "\n", c.out);
  }
  for (const auto& k : r.checks) {
    if (!k.passed) std::cerr << "identity failed: " << k.name << " (deviation " << k.max_deviation << ")\n";
  }
  return r.all_passed() ? 0 : 1;
}

int cmd_bench(const Common& c, const BenchOptions& options) {
  const Format format = parse_format(c.format);
  BenchOptions o = options;
  o.seed = c.seed;
  const auto rows = run_bench(o);

  if (format == Format::csv) {
    std::ostringstream s;
    s.precision(6);
    s << "estimator,n,seconds\n";
    for (const auto& r : rows) s << r.estimator << ',' << r.n << ',' << r.seconds << '\n';
    emit(s.str(), c.out);
    return 0;
  }
  ordered_json doc;
  doc["schema"] = kSchema;
  doc["command"] = "bench";
  doc["seed"] = o.seed;
  doc["repeats"] = o.repeats;
  doc["sizes"] = o.sizes;
  doc["rows"] = ordered_json::array();
  for (const auto& r : rows) doc["rows"].push_back({{"estimator", r.estimator}, {"n", r.n}, {"seconds", r.seconds}});
  doc["growth_512_to_1024"] = ordered_json::object();
  for (const auto& est : o.estimators) {
    try {
      doc["growth_512_to_1024"][est] = growth_factor(rows, est, 512, 1024);
    } catch (const InputError&) {
      // sizes did not include both endpoints
    }
  }
  emit(doc.dump(2) + "\n", c.out);
  return 0;
}

int cmd_generate(const Common& c, const GeneratorSpec& spec, const std::string& model) {
  GeneratorSpec g = spec;
  g.model = parse_generator_model(model);
  g.seed = c.seed;
  std::ostringstream s;
  write_csv(s, generate(g));
  emit(s.str(), c.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cimeter: kernel and distance measures of conditional dependence"};
  app.require_subcommand(1);

  Common common;
  Estimation est;
  TestFlags tflags;
  BenchOptions bench;
  GeneratorSpec gen;
  std::string model = "gaussian_ci";
  bool inject_fault = false;
  std::optional<double> bandwidth, lambda;

  const auto add_common = [&](CLI::App* sub, bool with_input, bool with_format = true) {
    if (with_input) {
      sub->add_option("--input", common.input, "CSV file with a header row")->required();
      sub->add_option("--roles", common.roles, "column roles, e.g. \"x=a,b;y=c;z=d\" (default: the file's #roles line)");
    }
    sub->add_option("--out", common.out, "output path (default: stdout)");
    if (with_format) sub->add_option("--format", common.format, "json or csv")->capture_default_str();
    sub->add_option("--seed", common.seed, "random seed")->capture_default_str();
  };
  const auto add_estimation = [&](CLI::App* sub) {
    sub->add_option("--kernel-x", est.kernel_x, "gaussian[:BW] | laplacian[:S] | dirac | distance[:METRIC][@anchor]")
        ->capture_default_str();
    sub->add_option("--kernel-y", est.kernel_y, "kernel on Y")->capture_default_str();
    sub->add_option("--kernel-z", est.kernel_z, "kernel on Z")->capture_default_str();
    sub->add_option("--metric-x", est.metric_x, "euclidean | euclidean^ALPHA | kernel:KERNEL")->capture_default_str();
    sub->add_option("--metric-y", est.metric_y, "semimetric on Y")->capture_default_str();
    sub->add_option("--smoothing", est.smoothing, "gaussian[:T] | epanechnikov[:T] | box[:T]")->capture_default_str();
    sub->add_option("--bandwidth", bandwidth, "smoothing bandwidth t (overrides --smoothing's)");
    sub->add_option("--lambda", lambda, "ridge parameter for hscic_trace (default 1e-3 mean diag K_Z)");
  };

  auto* compute = app.add_subcommand("compute", "evaluate one measure on a dataset");
  add_common(compute, true);
  add_estimation(compute);
  compute->add_option("--measure", est.measure,
                      "dcov_v | hsic_v | gcdcov_at | hscic_at | avg_hscic | gcdcov_avg | hscic_vstat | hscic_trace")
      ->required();
  compute->add_option("--at-row", est.at_row, "eval row for gcdcov_at / hscic_at")->capture_default_str();

  auto* test = app.add_subcommand("test", "local permutation test of X independent of Y given Z");
  add_common(test, true);
  add_estimation(test);
  test->add_option("--measure", est.measure, "avg_hscic | hscic_vstat | hscic_trace | gcdcov_avg (default hscic_trace)");
  test->add_option("--B", tflags.B, "permutation replicates")->capture_default_str();
  test->add_option("--knn", tflags.knn, "Z-neighborhood size")->capture_default_str();
  test->add_option("--alpha", tflags.alpha, "test level")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "run the identity and oracle suite");
  add_common(verify, false);
  verify->add_flag("--inject-fault", inject_fault)->group("");

  auto* bench_cmd = app.add_subcommand("bench", "runtime table over n in {128, 256, 512, 1024}");
  add_common(bench_cmd, false);
  bench_cmd->add_option("--repeats", bench.repeats, "timings per cell (fastest kept)")->capture_default_str();

  auto* generate_cmd = app.add_subcommand("generate", "write a synthetic dataset as CSV");
  add_common(generate_cmd, false, false);
  generate_cmd->add_option("--model", model, "gaussian_ci | gaussian_dep | postnonlinear_ci | discrete_z_mixture")
      ->capture_default_str();
  generate_cmd->add_option("--coupling", gen.coupling, "gaussian_dep coupling c")->capture_default_str();
  generate_cmd->add_option("--levels", gen.levels, "discrete_z_mixture levels")->capture_default_str();
  generate_cmd->add_option("--n", gen.n, "rows")->capture_default_str();
  generate_cmd->add_option("--p", gen.p, "X columns")->capture_default_str();
  generate_cmd->add_option("--q", gen.q, "Y columns")->capture_default_str();
  generate_cmd->add_option("--r", gen.r, "Z columns")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  est.bandwidth = bandwidth;
  est.lambda = lambda;

  try {
    if (compute->parsed()) return cmd_compute(common, est);
    if (test->parsed()) return cmd_test(common, est, tflags);
    if (verify->parsed()) return cmd_verify(common, inject_fault);
    if (bench_cmd->parsed()) return cmd_bench(common, bench);
    if (generate_cmd->parsed()) return cmd_generate(common, gen, model);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
