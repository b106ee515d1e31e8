#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "konp/report.hpp"
#include "konp/scenarios.hpp"
#include "konp/suite.hpp"

namespace konp {

struct PowerOptions {
  std::vector<std::size_t> sizes{100};
  std::string censoring = "equal_25";
  std::vector<Method> methods{Method::konp_p};
  std::size_t replications = 500;
  double alpha = 0.05;
  PermutationPlan plan = PermutationPlan::simulation();  // seed and threads are ignored
  MvnOptions mvn;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// One (n, method) cell of a power study.
struct PowerResult {
  std::string scenario;
  std::string censoring;
  std::size_t n = 0;
  std::string method;
  std::size_t replications = 0;
  double alpha = 0.05;
  double rejection_rate = 0.0;
  double mc_se = 0.0;           // sqrt(r (1 - r) / replications)
  double censoring_rate = 0.0;  // mean over replications
};

/// Seed of replication `rep` at size n; all randomness of that replication
/// (data and permutation plan) derives from it.
std::uint64_t replication_seed(std::uint64_t master, std::size_t n, std::size_t rep);

/// Rejection rates at level alpha, p <= alpha counting as a rejection.
/// Replications run in parallel, each single-threaded, so the result is the
/// same for any thread count.
std::vector<PowerResult> run_power_study(const ScenarioFamily& scenario,
                                         const PowerOptions& options);

/// Rate lambda of an Exp(lambda) censoring time giving P(C < X) = target when
/// X ~ log-logistic(1,1); solves lambda e^lambda E1(lambda) = target.
double exponential_censoring_rate(double target);

/// Null two-group dataset used for timing: log-logistic(1,1) failures, n/2 per
/// group, exponential censoring tuned to the two requested censoring rates.
SurvivalDataset benchmark_dataset(std::size_t n, double censoring_1, double censoring_2,
                                  std::uint64_t seed);

}  // namespace konp
