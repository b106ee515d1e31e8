#include "konp/km.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "konp/error.hpp"

namespace konp {

double KMCurve::cdf(double t) const {
  const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
  if (it == jump_times.begin()) return 0.0;
  return cumulative_mass[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

double KMCurve::cdf_left(double t) const {
  const auto it = std::lower_bound(jump_times.begin(), jump_times.end(), t);
  if (it == jump_times.begin()) return 0.0;
  return cumulative_mass[static_cast<std::size_t>(it - jump_times.begin()) - 1];
}

double KMCurve::weighted_count(double a, double b) const {
  if (b < a) return 0.0;
  const auto lo = static_cast<std::size_t>(
      std::lower_bound(jump_times.begin(), jump_times.end(), a) - jump_times.begin());
  const auto hi = static_cast<std::size_t>(
      std::upper_bound(jump_times.begin(), jump_times.end(), b) - jump_times.begin());
  if (hi <= lo) return 0.0;
  return cumulative_weights[hi - 1] - (lo == 0 ? 0.0 : cumulative_weights[lo - 1]);
}

KMCurve km_fit(std::span<const double> times, std::span<const std::uint8_t> events) {
  if (times.size() != events.size())
    throw ValidationError(ErrorCode::length_mismatch, "km_fit: times and events differ in length");
  KMCurve curve;
  const std::size_t n = times.size();
  curve.sample_size = n;
  if (n == 0) return curve;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (times[a] != times[b]) return times[a] < times[b];
    return events[a] > events[b];
  });
  curve.support_end = times[order.back()];

  // Every record still at risk carries the same redistributed weight w; an event
  // at t receives w and a censoring at t hands its w to the records beyond t.
  double w = 1.0;
  double survival = 1.0;
  double cumulative = 0.0;
  double cumulative_weight = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  std::size_t at_risk = n;
  std::size_t i = 0;
  while (i < n) {
    const double t = times[order[i]];
    std::size_t deaths = 0;
    std::size_t censored = 0;
    while (i < n && times[order[i]] == t) {
      if (events[order[i]]) ++deaths;
      else ++censored;
      ++i;
    }
    if (deaths > 0) {
      const double weight = static_cast<double>(deaths) * w;
      survival *= 1.0 - static_cast<double>(deaths) / static_cast<double>(at_risk);
      cumulative += weight * inv_n;
      cumulative_weight += weight;
      curve.jump_times.push_back(t);
      curve.jump_weights.push_back(weight);
      curve.jump_masses.push_back(weight * inv_n);
      curve.survival_after.push_back(survival);
      curve.cumulative_mass.push_back(cumulative);
      curve.cumulative_weights.push_back(cumulative_weight);
    }
    const std::size_t beyond = at_risk - deaths - censored;
    if (censored > 0 && beyond > 0)
      w *= static_cast<double>(beyond + censored) / static_cast<double>(beyond);
    at_risk = beyond;
  }
  curve.complete = !curve.empty() && curve.survival_after.back() == 0.0;
  return curve;
}

KMCurve km_censoring_fit(const SurvivalDataset& data, std::size_t group) {
  if (group >= data.group_count())
    throw ValidationError(ErrorCode::invalid_argument, "km_censoring_fit: no such group");
  std::vector<double> t;
  std::vector<std::uint8_t> c;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.groups()[i] != group) continue;
    t.push_back(data.times()[i]);
    c.push_back(data.events()[i] ? 0 : 1);
  }
  return km_fit(t, c);
}

KMCurve km_conditional_fit(const SurvivalDataset& data, double threshold) {
  std::vector<double> t;
  std::vector<std::uint8_t> e;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.times()[i] > threshold) {
      t.push_back(data.times()[i]);
      e.push_back(data.events()[i]);
    }
  }
  return km_fit(t, e);
}

KMDraw km_sample(const KMCurve& curve, RandomStream& rng, const std::optional<TailPolicy>& tail) {
  if (!curve.complete && !tail)
    throw ValidationError(ErrorCode::invalid_argument,
                          "km_sample: incomplete curve requires a tail policy");
  const double u = rng.uniform();
  const auto it = std::upper_bound(curve.cumulative_mass.begin(), curve.cumulative_mass.end(), u);
  if (it != curve.cumulative_mass.end())
    return {curve.jump_times[static_cast<std::size_t>(it - curve.cumulative_mass.begin())], false};
  // u fell beyond the accumulated mass. For a complete curve that is rounding.
  if (curve.complete) return {curve.jump_times.back(), false};
  return {tail->value, true};
}

double synthetic_tail_epsilon(double max_observed_time) {
  return 1e-9 * (1.0 + max_observed_time);
}

}  // namespace konp
