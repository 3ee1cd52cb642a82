#include "cimeter/bench.hpp"

#include "cimeter/citest.hpp"
#include "cimeter/conditional.hpp"
#include "cimeter/errors.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

namespace cimeter {

namespace {

double run_once(const std::string& estimator, const Dataset& d) {
  const KernelSpec k = KernelSpec::gaussian();
  switch (parse_statistic(estimator)) {
    case Statistic::avg_hscic: return avg_hscic(k, k, d, {}).value;
    case Statistic::hscic_vstat: return hscic_vstat(k, k, k, d, {}).value;
    case Statistic::hscic_trace: return hscic_trace(k, k, k, d, {}).value;
    case Statistic::gcdcov_avg:
      return gcdcov_avg(SemimetricSpec::euclidean(), SemimetricSpec::euclidean(), d, {}).value;
  }
  return 0.0;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  if (options.repeats < 1) throw InputError("bench needs repeats >= 1");
  std::vector<BenchRow> rows;
  for (const Eigen::Index n : options.sizes) {
    GeneratorSpec spec;
    spec.n = n;
    spec.seed = options.seed;
    const Dataset d = generate(spec);
    for (const auto& estimator : options.estimators) {
      double best = std::numeric_limits<double>::infinity();
      for (int rep = 0; rep < options.repeats; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        volatile double sink = run_once(estimator, d);
        (void)sink;
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      }
      rows.push_back({estimator, n, best});
    }
  }
  return rows;
}

double growth_factor(const std::vector<BenchRow>& rows, const std::string& estimator, Eigen::Index n_from,
                     Eigen::Index n_to) {
  const auto find = [&](Eigen::Index n) {
    const auto it = std::find_if(rows.begin(), rows.end(),
                                 [&](const BenchRow& r) { return r.estimator == estimator && r.n == n; });
    if (it == rows.end()) throw InputError("no bench row for " + estimator + " at n = " + std::to_string(n));
    return it->seconds;
  };
  return find(n_to) / find(n_from);
}

}  // namespace cimeter
