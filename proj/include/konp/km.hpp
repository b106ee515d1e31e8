#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "konp/dataset.hpp"
#include "konp/rng.hpp"

namespace konp {

/// Kaplan-Meier estimate of a distribution function, stored as its jumps.
///
/// `jump_weights[j]` is the sample size times the probability mass of jump j
/// (the redistribute-to-the-right count of Efron). Without censoring every
/// weight is the exact integer number of observations at that time, so counts
/// derived from the curve are exact.
struct KMCurve {
  std::vector<double> jump_times;       // strictly increasing
  std::vector<double> jump_masses;      // dF at each jump
  std::vector<double> jump_weights;     // sample_size * jump_masses, exact for uncensored data
  std::vector<double> survival_after;   // product-limit S(t) just after each jump
  std::vector<double> cumulative_mass;  // F(t) at each jump
  std::vector<double> cumulative_weights;
  bool complete = false;                // total mass is one
  double support_end = 0.0;             // largest observed time
  std::size_t sample_size = 0;

  std::size_t size() const { return jump_times.size(); }
  bool empty() const { return jump_times.empty(); }
  double total_mass() const { return cumulative_mass.empty() ? 0.0 : cumulative_mass.back(); }

  double cdf(double t) const;       // F(t), right-continuous
  double cdf_left(double t) const;  // F(t-)
  double survival(double t) const { return 1.0 - cdf(t); }
  double survival_left(double t) const { return 1.0 - cdf_left(t); }

  /// sample_size * (F(b) - F(a-)): the KM-weighted number of observations in [a, b].
  double weighted_count(double a, double b) const;
};

inline constexpr double kMassTolerance = 1e-12;

/// Product-limit estimator of the CDF. Events are processed before censorings at
/// tied times. Data with no events give an empty, incomplete curve.
KMCurve km_fit(std::span<const double> times, std::span<const std::uint8_t> events);

/// KM of the censoring distribution of one group (event indicator complemented).
KMCurve km_censoring_fit(const SurvivalDataset& data, std::size_t group);

/// KM of the pooled records with time strictly greater than `threshold`.
KMCurve km_conditional_fit(const SurvivalDataset& data, double threshold);

/// Value returned with the residual probability 1 - total_mass of an incomplete curve.
struct TailPolicy {
  double value = 0.0;

  static TailPolicy tail_value(double v) { return {v}; }
  static TailPolicy tail_value_plus_epsilon(double v, double epsilon) { return {v + epsilon}; }
};

struct KMDraw {
  double value = 0.0;
  bool synthetic_tail = false;
};

/// Draws jump j with probability jump_masses[j]; the residual mass goes to the
/// tail policy. Throws ValidationError for an incomplete curve without a policy.
KMDraw km_sample(const KMCurve& curve, RandomStream& rng,
                 const std::optional<TailPolicy>& tail = std::nullopt);

/// Fixed epsilon for the synthetic tail of conditional failure-time draws.
double synthetic_tail_epsilon(double max_observed_time);

}  // namespace konp
