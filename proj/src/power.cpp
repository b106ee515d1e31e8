#include "konp/power.hpp"

#include <cmath>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/tools/roots.hpp>

#include "konp/error.hpp"
#include "konp/numeric.hpp"

namespace konp {

std::uint64_t replication_seed(std::uint64_t master, std::size_t n, std::size_t rep) {
  return derive_seed(master, n, rep);
}

std::vector<PowerResult> run_power_study(const ScenarioFamily& scenario,
                                         const PowerOptions& options) {
  if (options.replications == 0)
    throw ValidationError(ErrorCode::invalid_argument,
                          "power study needs at least one replication");
  if (options.sizes.empty())
    throw ValidationError(ErrorCode::invalid_argument,
                          "power study needs at least one sample size");
  if (!(options.alpha > 0.0 && options.alpha < 1.0))
    throw ValidationError(ErrorCode::invalid_argument, "alpha must lie in (0, 1)");
  const ScenarioSpec spec = scenario.resolve(options.censoring);
  const std::vector<Method> methods = resolve_methods(options.methods, spec.k);
  const std::size_t reps = options.replications;
  const unsigned threads = resolve_threads(options.threads);

  std::vector<PowerResult> out;
  for (std::size_t n : options.sizes) {
    if (n < 2 * spec.k)
      throw ValidationError(ErrorCode::invalid_argument, "sample size too small for the groups");
    std::vector<std::uint8_t> reject(reps * methods.size(), 0);
    std::vector<double> censored(reps, 0.0);
    parallel_for(reps, threads, [&](std::size_t rep, unsigned) {
      const std::uint64_t seed = replication_seed(options.seed, n, rep);
      RandomStream rng(seed);
      const SurvivalDataset data = generate_dataset(spec, n, rng);
      std::size_t events = 0;
      for (auto e : data.events()) events += e;
      censored[rep] = 1.0 - static_cast<double>(events) / static_cast<double>(n);
      SuiteOptions suite{options.plan, options.mvn};
      suite.plan.seed = derive_seed(seed, 0x7065726d);
      suite.plan.threads = 1;
      const std::vector<TestReport> reports = run_test_suite(data, methods, suite);
      for (std::size_t m = 0; m < methods.size(); ++m)
        reject[rep * methods.size() + m] = reports[m].pvalue <= options.alpha ? 1 : 0;
    });
    double mean_censored = 0.0;
    for (double c : censored) mean_censored += c;
    mean_censored /= static_cast<double>(reps);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      std::size_t hits = 0;
      for (std::size_t rep = 0; rep < reps; ++rep) hits += reject[rep * methods.size() + m];
      PowerResult row;
      row.scenario = scenario.name;
      row.censoring = options.censoring;
      row.n = n;
      row.method = std::string(method_name(methods[m]));
      row.replications = reps;
      row.alpha = options.alpha;
      row.rejection_rate = static_cast<double>(hits) / static_cast<double>(reps);
      row.mc_se = std::sqrt(row.rejection_rate * (1.0 - row.rejection_rate) /
                            static_cast<double>(reps));
      row.censoring_rate = mean_censored;
      out.push_back(row);
    }
  }
  return out;
}

double exponential_censoring_rate(double target) {
  if (!(target > 0.0 && target < 1.0))
    throw ValidationError(ErrorCode::invalid_argument, "censoring rate must lie in (0, 1)");
  // lambda e^lambda E1(lambda) increases from 0 to 1 in lambda.
  const auto g = [&](double lambda) {
    return lambda * std::exp(lambda) * boost::math::expint(1, lambda) - target;
  };
  double lo = 1e-12;
  double hi = 1.0;
  while (g(hi) < 0.0) hi *= 2.0;
  std::uintmax_t iterations = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      g, lo, hi, boost::math::tools::eps_tolerance<double>(50), iterations);
  return 0.5 * (a + b);
}

SurvivalDataset benchmark_dataset(std::size_t n, double censoring_1, double censoring_2,
                                  std::uint64_t seed) {
  ScenarioSpec spec;
  spec.name = "benchmark";
  spec.k = 2;
  spec.failure = {Distribution::log_logistic(1.0, 1.0), Distribution::log_logistic(1.0, 1.0)};
  spec.censoring = {Distribution::exponential(exponential_censoring_rate(censoring_1)),
                    Distribution::exponential(exponential_censoring_rate(censoring_2))};
  spec.fractions = {0.5, 0.5};
  RandomStream rng(seed);
  return generate_dataset(spec, n, rng);
}

}  // namespace konp
