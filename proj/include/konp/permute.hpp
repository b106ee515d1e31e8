#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "konp/dataset.hpp"
#include "konp/km.hpp"
#include "konp/report.hpp"
#include "konp/rng.hpp"

namespace konp {

enum class PValueRule { paper_exact, add_one };

/// M imputations times B label permutations, all drawn from streams derived from
/// `seed`. The p-value does not depend on `threads`.
struct PermutationPlan {
  std::size_t imputations = 10;
  std::size_t permutations = 10000;
  std::uint64_t seed = 1;
  PValueRule rule = PValueRule::paper_exact;
  unsigned threads = 0;  // 0 = hardware concurrency

  std::size_t replicates() const { return imputations * permutations; }

  static PermutationPlan data_analysis(std::uint64_t seed = 1) { return {10, 10000, seed}; }
  static PermutationPlan simulation(std::uint64_t seed = 1) { return {1, 1000, seed}; }
};

/// Below this many replicates the p-value resolution is coarse; callers warn.
inline constexpr std::size_t kMinRecommendedReplicates = 100;

/// Null-model ingredients for imputing relabelled records, fitted once on the
/// observed data: per-group censoring KM curves and the pooled conditional KM
/// beyond every distinct censored time.
class ImputationModel {
 public:
  explicit ImputationModel(const SurvivalDataset& data);

  const KMCurve& censoring_curve(std::size_t group) const { return censoring_[group]; }
  /// Group has no censored records: its censoring time is +infinity.
  bool never_censors(std::size_t group) const { return censoring_[group].empty(); }
  /// Largest observed censoring time of the group, drawn with the residual mass.
  double censoring_tail(std::size_t group) const { return censoring_tail_[group]; }

  /// Conditional KM of X given X > T_r, for a censored record r of the data.
  const KMCurve& conditional_curve(std::size_t record) const;
  /// max(T_i * Delta_i) + epsilon; drawn with the residual conditional mass.
  double failure_tail() const { return failure_tail_; }

  /// Draws a censoring time for a record moved into `group`.
  double draw_censoring(std::size_t group, RandomStream& rng) const;

 private:
  std::vector<KMCurve> censoring_;
  std::vector<double> censoring_tail_;
  std::vector<KMCurve> conditional_;
  std::vector<std::uint32_t> conditional_index_;  // per record; npos for events
  double failure_tail_ = 0.0;
};

/// Mutable replicate dataset; may have no events, unlike SurvivalDataset.
struct ReplicateSample {
  std::vector<double> times;
  std::vector<std::uint8_t> events;
  std::vector<std::uint32_t> groups;
  std::size_t group_count = 0;

  SampleView view() const { return {times, events, groups, group_count}; }
};

/// Uniform random permutation of the group labels (Fisher-Yates).
void permute_labels(std::span<const std::uint32_t> groups, RandomStream& rng,
                    std::vector<std::uint32_t>& out);

/// Stream of record `record` within replicate (imputation, permutation).
RandomStream record_stream(std::uint64_t seed, std::size_t imputation, std::size_t permutation,
                           std::size_t record);
/// Stream used to shuffle labels in replicate (imputation, permutation).
RandomStream permutation_stream(std::uint64_t seed, std::size_t imputation,
                                std::size_t permutation);

/// Builds the replicate dataset for the permuted labels. Records whose label is
/// unchanged keep (T, Delta); moved records get a censoring time from the new
/// group's censoring KM and, when originally censored, a failure time from the
/// conditional KM. A synthetic-tail failure draw is never an event.
void impute_replicate(const SurvivalDataset& data, std::span<const std::uint32_t> permuted_groups,
                      const ImputationModel& model, std::uint64_t seed, std::size_t imputation,
                      std::size_t permutation, ReplicateSample& out);

struct StatisticValue {
  double value = 0.0;
  bool degenerate = false;
};

/// Maps a sample to one or more statistics; larger values are more extreme.
/// Must be safe to call concurrently.
using StatisticFn = std::function<std::vector<StatisticValue>(const SampleView&)>;

/// Imputation-permutation p-values for each statistic returned by `statistic`,
/// all evaluated on one shared pool of M * B replicates. Replicate values within
/// a relative 1e-12 of the observed value count as ties, and ties count as at
/// least as large.
std::vector<TestReport> permutation_pvalue(const SurvivalDataset& data,
                                           const StatisticFn& statistic,
                                           std::span<const std::string> names,
                                           const PermutationPlan& plan);

/// Cauchy combination of p-values with equal weights. Inputs at 0 or 1 are moved
/// to 1/(R+1) and 1 - 1/(R+1) with R = `replicates`; R = 0 makes them an error.
double cauchy_combination(std::span<const double> pvalues, std::size_t replicates = 0);

/// The combined statistic, mean of tan((0.5 - p) * pi).
double cauchy_statistic(std::span<const double> pvalues, std::size_t replicates = 0);

}  // namespace konp
