#include "konp/permute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "konp/error.hpp"
#include "konp/numeric.hpp"

namespace konp {

namespace {

constexpr std::uint32_t kNoCurve = std::numeric_limits<std::uint32_t>::max();
constexpr std::uint32_t kShuffleStream = std::numeric_limits<std::uint32_t>::max();
constexpr double kTieTolerance = 1e-12;

}  // namespace

ImputationModel::ImputationModel(const SurvivalDataset& data) {
  const std::size_t k = data.group_count();
  const auto times = data.times();
  const auto events = data.events();
  censoring_.reserve(k);
  censoring_tail_.assign(k, std::numeric_limits<double>::infinity());
  for (std::size_t g = 0; g < k; ++g) censoring_.push_back(km_censoring_fit(data, g));
  double max_event = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (events[i]) {
      max_event = std::max(max_event, times[i]);
    } else {
      double& tail = censoring_tail_[data.groups()[i]];
      tail = std::isinf(tail) ? times[i] : std::max(tail, times[i]);
    }
  }
  const double max_time = *std::max_element(times.begin(), times.end());
  failure_tail_ = max_event + synthetic_tail_epsilon(max_time);

  // One conditional curve per distinct censored time, fitted on the suffix of
  // the time-sorted records lying strictly beyond it.
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  std::vector<double> sorted_times(order.size());
  std::vector<std::uint8_t> sorted_events(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    sorted_times[r] = times[order[r]];
    sorted_events[r] = events[order[r]];
  }
  conditional_index_.assign(data.size(), kNoCurve);
  std::size_t r = 0;
  while (r < order.size()) {
    const double t = sorted_times[r];
    std::size_t end = r;
    bool any_censored = false;
    while (end < order.size() && sorted_times[end] == t) any_censored |= !sorted_events[end++];
    if (any_censored) {
      const std::span<const double> st(sorted_times);
      const std::span<const std::uint8_t> se(sorted_events);
      conditional_.push_back(km_fit(st.subspan(end), se.subspan(end)));
      const auto index = static_cast<std::uint32_t>(conditional_.size() - 1);
      for (std::size_t q = r; q < end; ++q)
        if (!sorted_events[q]) conditional_index_[order[q]] = index;
    }
    r = end;
  }
}

const KMCurve& ImputationModel::conditional_curve(std::size_t record) const {
  const std::uint32_t index = conditional_index_.at(record);
  if (index == kNoCurve)
    throw ValidationError(ErrorCode::invalid_argument,
                          "conditional_curve: record is an event, not censored");
  return conditional_[index];
}

double ImputationModel::draw_censoring(std::size_t group, RandomStream& rng) const {
  if (never_censors(group)) return std::numeric_limits<double>::infinity();
  return km_sample(censoring_[group], rng, TailPolicy::tail_value(censoring_tail_[group])).value;
}

void permute_labels(std::span<const std::uint32_t> groups, RandomStream& rng,
                    std::vector<std::uint32_t>& out) {
  out.assign(groups.begin(), groups.end());
  for (std::size_t i = out.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(out[i - 1], out[j]);
  }
}

RandomStream record_stream(std::uint64_t seed, std::size_t imputation, std::size_t permutation,
                           std::size_t record) {
  return RandomStream(seed, {static_cast<std::uint32_t>(record),
                             static_cast<std::uint32_t>(imputation),
                             static_cast<std::uint32_t>(permutation)});
}

RandomStream permutation_stream(std::uint64_t seed, std::size_t imputation,
                                std::size_t permutation) {
  return RandomStream(seed, {kShuffleStream, static_cast<std::uint32_t>(imputation),
                             static_cast<std::uint32_t>(permutation)});
}

void impute_replicate(const SurvivalDataset& data, std::span<const std::uint32_t> permuted_groups,
                      const ImputationModel& model, std::uint64_t seed, std::size_t imputation,
                      std::size_t permutation, ReplicateSample& out) {
  const std::size_t n = data.size();
  if (permuted_groups.size() != n)
    throw ValidationError(ErrorCode::length_mismatch, "impute_replicate: label count differs");
  const auto times = data.times();
  const auto events = data.events();
  const auto groups = data.groups();
  out.times.resize(n);
  out.events.resize(n);
  out.groups.assign(permuted_groups.begin(), permuted_groups.end());
  out.group_count = data.group_count();
  const TailPolicy failure_tail = TailPolicy::tail_value(model.failure_tail());
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t g = permuted_groups[i];
    if (g == groups[i]) {
      out.times[i] = times[i];
      out.events[i] = events[i];
      continue;
    }
    RandomStream rng = record_stream(seed, imputation, permutation, i);
    const double c = model.draw_censoring(g, rng);
    KMDraw x{times[i], false};
    if (!events[i]) x = km_sample(model.conditional_curve(i), rng, failure_tail);
    if (x.value <= c) {
      out.times[i] = x.value;
      out.events[i] = x.synthetic_tail ? 0 : 1;
    } else {
      out.times[i] = c;
      out.events[i] = 0;
    }
  }
}

std::vector<TestReport> permutation_pvalue(const SurvivalDataset& data,
                                           const StatisticFn& statistic,
                                           std::span<const std::string> names,
                                           const PermutationPlan& plan) {
  if (plan.imputations == 0 || plan.permutations == 0)
    throw ValidationError(ErrorCode::invalid_argument,
                          "permutation_pvalue: imputations and permutations must be positive");
  if (plan.imputations > kShuffleStream || plan.permutations > kShuffleStream ||
      data.size() >= kShuffleStream)
    throw ValidationError(ErrorCode::invalid_argument, "permutation_pvalue: plan too large");

  const std::vector<StatisticValue> observed = statistic(data.view());
  if (observed.size() != names.size())
    throw ValidationError(ErrorCode::invalid_argument,
                          "permutation_pvalue: statistic count does not match names");
  const std::size_t s = observed.size();
  const std::size_t total = plan.replicates();

  std::vector<TestReport> reports(s);
  bool any_live = false;
  for (std::size_t q = 0; q < s; ++q) {
    reports[q].method = names[q];
    reports[q].statistic = observed[q].value;
    reports[q].replicates = total;
    reports[q].seed = plan.seed;
    reports[q].degenerate = observed[q].degenerate;
    reports[q].pvalue = 1.0;
    if (observed[q].degenerate) reports[q].note = "no admissible tables in the observed data";
    any_live |= !observed[q].degenerate;
  }
  if (!any_live) return reports;

  const ImputationModel model(data);
  // exceed[r * s + q] is set when replicate r is at least as large as observed q.
  std::vector<std::uint8_t> exceed(total * s, 0);
  const unsigned threads = resolve_threads(plan.threads);
  parallel_for(total, threads, [&](std::size_t r, unsigned) {
    thread_local std::vector<std::uint32_t> labels;
    thread_local ReplicateSample sample;
    const std::size_t m = r / plan.permutations;
    const std::size_t b = r % plan.permutations;
    RandomStream shuffle = permutation_stream(plan.seed, m, b);
    permute_labels(data.groups(), shuffle, labels);
    impute_replicate(data, labels, model, plan.seed, m, b, sample);
    const std::vector<StatisticValue> values = statistic(sample.view());
    for (std::size_t q = 0; q < s; ++q) {
      const double obs = observed[q].value;
      exceed[r * s + q] = values[q].value >= obs - kTieTolerance * std::abs(obs) ? 1 : 0;
    }
  });

  for (std::size_t q = 0; q < s; ++q) {
    if (observed[q].degenerate) continue;
    std::size_t count = 0;
    for (std::size_t r = 0; r < total; ++r) count += exceed[r * s + q];
    reports[q].pvalue = plan.rule == PValueRule::add_one
                            ? static_cast<double>(count + 1) / static_cast<double>(total + 1)
                            : static_cast<double>(count) / static_cast<double>(total);
  }
  return reports;
}

double cauchy_statistic(std::span<const double> pvalues, std::size_t replicates) {
  if (pvalues.empty())
    throw ValidationError(ErrorCode::invalid_argument, "cauchy_combination: no p-values");
  CompensatedSum sum;
  for (double p : pvalues) {
    if (!(p >= 0.0 && p <= 1.0))
      throw ValidationError(ErrorCode::invalid_argument, "cauchy_combination: p outside [0, 1]");
    if (p <= 0.0 || p >= 1.0) {
      if (replicates == 0)
        throw ValidationError(ErrorCode::invalid_argument,
                              "cauchy_combination: p of 0 or 1 needs a replicate count");
      const double edge = 1.0 / static_cast<double>(replicates + 1);
      p = std::clamp(p, edge, 1.0 - edge);
    }
    sum.add(std::tan((0.5 - p) * std::numbers::pi));
  }
  return sum.value() / static_cast<double>(pvalues.size());
}

double cauchy_combination(std::span<const double> pvalues, std::size_t replicates) {
  return 0.5 - std::atan(cauchy_statistic(pvalues, replicates)) / std::numbers::pi;
}

}  // namespace konp
