#include "cimeter/citest.hpp"

#include "cimeter/errors.hpp"
#include "cimeter/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>

namespace cimeter {

Statistic parse_statistic(std::string_view text) {
  if (text == "avg_hscic") return Statistic::avg_hscic;
  if (text == "hscic_vstat") return Statistic::hscic_vstat;
  if (text == "hscic_trace") return Statistic::hscic_trace;
  if (text == "gcdcov_avg") return Statistic::gcdcov_avg;
  throw InputError("unknown test statistic '" + std::string(text) +
                   "' (expected avg_hscic, hscic_vstat, hscic_trace or gcdcov_avg)");
}

std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::avg_hscic: return "avg_hscic";
    case Statistic::hscic_vstat: return "hscic_vstat";
    case Statistic::hscic_trace: return "hscic_trace";
    case Statistic::gcdcov_avg: return "gcdcov_avg";
  }
  return "unknown";
}

void TestConfig::validate(Eigen::Index n) const {
  if (B < 19) throw InputError("B must be >= 19, got " + std::to_string(B));
  if (knn < 2) throw InputError("knn must be >= 2, got " + std::to_string(knn));
  if (n < 2 * knn) {
    throw InputError("local permutation needs n >= 2*knn (n = " + std::to_string(n) + ", knn = " +
                     std::to_string(knn) + ")");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
}

std::vector<std::vector<Eigen::Index>> z_neighborhoods(const PointSet& z, Eigen::Index knn) {
  const Eigen::Index n = z.rows();
  if (knn < 2 || n < 2 * knn) throw InputError("z_neighborhoods needs knn >= 2 and n >= 2*knn");

  std::vector<Eigen::Index> remaining(static_cast<std::size_t>(n));
  std::iota(remaining.begin(), remaining.end(), Eigen::Index{0});
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<std::pair<double, Eigen::Index>> order;

  while (static_cast<Eigen::Index>(remaining.size()) >= 2 * knn) {
    Eigen::RowVectorXd centroid = Eigen::RowVectorXd::Zero(z.cols());
    for (const Eigen::Index i : remaining) centroid += z.row(i);
    centroid /= static_cast<double>(remaining.size());

    Eigen::Index anchor = remaining.front();
    double farthest = -1.0;
    for (const Eigen::Index i : remaining) {
      const double dist = (z.row(i) - centroid).squaredNorm();
      if (dist > farthest) {
        farthest = dist;
        anchor = i;
      }
    }

    order.clear();
    for (const Eigen::Index i : remaining) order.emplace_back((z.row(i) - z.row(anchor)).squaredNorm(), i);
    std::partial_sort(order.begin(), order.begin() + knn, order.end());

    std::vector<Eigen::Index> group;
    for (Eigen::Index k = 0; k < knn; ++k) group.push_back(order[static_cast<std::size_t>(k)].second);
    std::sort(group.begin(), group.end());
    std::vector<Eigen::Index> rest;
    std::set_difference(remaining.begin(), remaining.end(), group.begin(), group.end(), std::back_inserter(rest));
    remaining = std::move(rest);
    groups.push_back(std::move(group));
  }
  groups.push_back(std::move(remaining));
  return groups;
}

std::vector<Eigen::Index> neighborhood_permutation(const std::vector<std::vector<Eigen::Index>>& groups,
                                                   Eigen::Index n, CounterRng& rng) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  std::vector<Eigen::Index> shuffled;
  for (const auto& group : groups) {
    shuffled = group;
    shuffle(std::span<Eigen::Index>(shuffled), rng);
    for (std::size_t k = 0; k < group.size(); ++k) perm[static_cast<std::size_t>(group[k])] = shuffled[k];
  }
  return perm;
}

double permutation_p_value(double observed, const std::vector<double>& replicates) {
  const double threshold = observed - (1e-12 + 1e-9 * std::abs(observed));
  const auto exceed = std::count_if(replicates.begin(), replicates.end(), [&](double r) { return r >= threshold; });
  return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(replicates.size()) + 1.0);
}

namespace {

Eigen::MatrixXd permuted(const Eigen::MatrixXd& k, const std::vector<Eigen::Index>& perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index pj = perm[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = k(perm[static_cast<std::size_t>(i)], pj);
  }
  return out;
}

double clamped_mean(const Eigen::VectorXd& values) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < values.size(); ++j) total += clamp_squared(values[j], "pointwise statistic");
  return total / static_cast<double>(values.size());
}

/// Everything that does not depend on the Y permutation, computed once.
struct PreparedStatistic {
  ParamMap params;
  std::function<double(const std::vector<Eigen::Index>&)> evaluate;
};

PreparedStatistic prepare(const TestConfig& cfg, const Dataset& d) {
  PreparedStatistic out;
  const auto weights = [&] {
    auto w = dataset_weights(d, cfg.smoothing);
    out.params["smoothing"] = w.scheme;
    if (w.scheme != "exact_match") out.params["bandwidth_t"] = w.bandwidth;
    return w;
  };

  switch (cfg.statistic) {
    case Statistic::hscic_trace: {
      const GramMatrix gx = gram_matrix(cfg.kernel_x, d.x);
      const GramMatrix gy = gram_matrix(cfg.kernel_y, d.y);
      const GramMatrix gz = gram_matrix(cfg.kernel_z, d.z);
      const double lambda = cfg.regularization.lambda ? *cfg.regularization.lambda : gram::default_lambda(gz.entries);
      out.params["kernel_x"] = to_string(gx.spec);
      out.params["kernel_y"] = to_string(gy.spec);
      out.params["kernel_z"] = to_string(gz.spec);
      out.params["lambda"] = lambda;
      auto g = std::make_shared<const Eigen::MatrixXd>(gram::trace_sandwich(gx.entries, gz.entries, lambda));
      auto ky = std::make_shared<const Eigen::MatrixXd>(gy.entries);
      out.evaluate = [g, ky](const std::vector<Eigen::Index>& perm) {
        // sum_ij G(i,j) Ky_pi(j,i), with Ky_pi(j,i) = Ky(perm j, perm i)
        const auto n = static_cast<Eigen::Index>(perm.size());
        double total = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
          const Eigen::Index pj = perm[static_cast<std::size_t>(j)];
          double col = 0.0;
          for (Eigen::Index i = 0; i < n; ++i) col += (*g)(i, j) * (*ky)(pj, perm[static_cast<std::size_t>(i)]);
          total += col;
        }
        return clamp_squared(total, "hscic_trace");
      };
      break;
    }
    case Statistic::avg_hscic:
    case Statistic::hscic_vstat: {
      const GramMatrix gx = gram_matrix(cfg.kernel_x, d.x);
      const GramMatrix gy = gram_matrix(cfg.kernel_y, d.y);
      out.params["kernel_x"] = to_string(gx.spec);
      out.params["kernel_y"] = to_string(gy.spec);
      auto w = std::make_shared<const Eigen::MatrixXd>(weights().w);
      auto kx = std::make_shared<const Eigen::MatrixXd>(gx.entries);
      auto ky = std::make_shared<const Eigen::MatrixXd>(gy.entries);
      if (cfg.statistic == Statistic::avg_hscic) {
        out.evaluate = [w, kx, ky](const std::vector<Eigen::Index>& perm) {
          return clamped_mean(gram::pointwise_hscic(*kx, permuted(*ky, perm), *w));
        };
      } else {
        const GramMatrix gz = gram_matrix(cfg.kernel_z, d.z);
        out.params["kernel_z"] = to_string(gz.spec);
        auto kz = std::make_shared<const Eigen::MatrixXd>(gz.entries);
        out.evaluate = [w, kx, ky, kz](const std::vector<Eigen::Index>& perm) {
          return clamp_squared(gram::vstat_from_h(*kz, gram::h_matrix(*kx, permuted(*ky, perm), *w)), "hscic_vstat");
        };
      }
      break;
    }
    case Statistic::gcdcov_avg: {
      const DistanceMatrix dx = distance_matrix(cfg.metric_x, d.x);
      const DistanceMatrix dy = distance_matrix(cfg.metric_y, d.y);
      out.params["metric_x"] = to_string(dx.spec);
      out.params["metric_y"] = to_string(dy.spec);
      auto w = std::make_shared<const Eigen::MatrixXd>(weights().w);
      auto mx = std::make_shared<const Eigen::MatrixXd>(dx.entries);
      auto my = std::make_shared<const Eigen::MatrixXd>(dy.entries);
      out.evaluate = [w, mx, my](const std::vector<Eigen::Index>& perm) {
        return clamped_mean(gram::pointwise_hscic(*mx, permuted(*my, perm), *w));
      };
      break;
    }
  }
  return out;
}

}  // namespace

TestReport local_permutation_test(const TestConfig& cfg, const Dataset& d) {
  d.validate();
  cfg.validate(d.n());

  const PreparedStatistic stat = prepare(cfg, d);
  const auto groups = z_neighborhoods(d.z, cfg.knn);

  std::vector<Eigen::Index> identity(static_cast<std::size_t>(d.n()));
  std::iota(identity.begin(), identity.end(), Eigen::Index{0});

  TestReport report;
  report.statistic = to_string(cfg.statistic);
  report.statistic_value = stat.evaluate(identity);
  report.alpha = cfg.alpha;
  report.B = cfg.B;
  report.knn = cfg.knn;
  report.n = d.n();
  report.seed = cfg.seed;
  report.params = stat.params;
  report.params["neighborhoods"] = static_cast<std::int64_t>(groups.size());
  report.replicate_values.assign(static_cast<std::size_t>(cfg.B), 0.0);

  parallel_for(static_cast<std::size_t>(cfg.B), [&](std::size_t r) {
    CounterRng rng(cfg.seed, r + 1);
    const auto perm = neighborhood_permutation(groups, d.n(), rng);
    try {
      report.replicate_values[r] = stat.evaluate(perm);
    } catch (const NumericalError& e) {
      throw NumericalError("replicate " + std::to_string(r) + ": " + e.what());
    } catch (const InputError& e) {
      throw InputError("replicate " + std::to_string(r) + ": " + e.what());
    }
  });

  report.p_value = permutation_p_value(report.statistic_value, report.replicate_values);
  report.reject = report.p_value <= cfg.alpha;
  return report;
}

ExperimentSummary size_power_experiment(const TestConfig& cfg, const GeneratorSpec& model, int runs) {
  if (runs < 1) throw InputError("size_power_experiment needs runs >= 1");
  ExperimentSummary summary;
  summary.runs = runs;
  double stat_total = 0.0;
  double time_total = 0.0;
  for (int i = 0; i < runs; ++i) {
    const auto start = std::chrono::steady_clock::now();
    GeneratorSpec spec = model;
    spec.seed = derive_seed(model.seed, static_cast<std::uint64_t>(i));
    TestConfig test = cfg;
    test.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
    const TestReport report = local_permutation_test(test, generate(spec));

    ExperimentRun run;
    run.data_seed = spec.seed;
    run.test_seed = test.seed;
    run.statistic_value = report.statistic_value;
    run.p_value = report.p_value;
    run.reject = report.reject;
    run.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    summary.rejections += run.reject ? 1 : 0;
    stat_total += run.statistic_value;
    time_total += run.runtime_ms;
    summary.per_run.push_back(run);
  }
  summary.rejection_rate = static_cast<double>(summary.rejections) / runs;
  summary.mean_statistic = stat_total / runs;
  summary.mean_runtime_ms = time_total / runs;
  return summary;
}

double ks_uniform_distance(std::vector<double> values) {
  if (values.empty()) throw InputError("ks_uniform_distance needs at least one value");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double u = std::clamp(values[i], 0.0, 1.0);
    worst = std::max({worst, (static_cast<double>(i) + 1.0) / n - u, u - static_cast<double>(i) / n});
  }
  return worst;
}

}  // namespace cimeter
