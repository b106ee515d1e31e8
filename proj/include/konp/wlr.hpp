#pragma once

#include <array>

#include <Eigen/Dense>

#include "konp/dataset.hpp"
#include "konp/mvn.hpp"
#include "konp/permute.hpp"
#include "konp/report.hpp"

namespace konp {

/// Fleming-Harrington (rho, gamma) pairs: logrank, early, late, middle.
inline constexpr std::array<std::array<double, 2>, 4> kWlrWeights{
    {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}};

struct WlrStatistic {
  std::array<double, 4> g{};
  Eigen::Matrix4d sigma = Eigen::Matrix4d::Zero();
  std::array<double, 4> z{};  // 0 where the variance vanishes
  bool degenerate = true;     // sigma_11 is zero
};

struct WeightedLogrank {
  double statistic = 0.0;  // G
  double variance = 0.0;   // sigma
  double z = 0.0;
  double pvalue = 1.0;  // two-sided, 2 (1 - Phi(|Z|))
  bool degenerate = true;
};

/// Two-sample weighted logrank with weight S(t-)^rho (1 - S(t-))^gamma, S the
/// pooled KM. Group 0 is the first sample.
WeightedLogrank weighted_logrank(const SurvivalDataset& data, double rho, double gamma);
WeightedLogrank weighted_logrank(const SampleView& sample, double rho, double gamma);

/// All four weighted statistics of kWlrWeights and their joint covariance.
WlrStatistic wlr_covariance(const SurvivalDataset& data);
WlrStatistic wlr_covariance(const SampleView& sample);

/// max(|Z2|, |Z3|) with its bivariate normal p-value.
TestReport lee_test(const SurvivalDataset& data, const MvnOptions& options = {});

/// max |Z_k| over the four weights with its four-variate normal p-value.
TestReport maxcombo_test(const SurvivalDataset& data, const MvnOptions& options = {});

enum class LogrankWeight { unit, pooled_km_left };

/// K-sample (weighted) logrank chi-square test. Unit weight is the logrank
/// test, the left-continuous pooled KM weight is Peto-Peto.
TestReport k_sample_logrank(const SurvivalDataset& data, LogrankWeight weight);

/// Weighted KM statistic: integral of w(t) (S1(t) - S2(t)) up to the smaller of
/// the two groups' largest times, w = n G1 G2 / (n1 G1 + n2 G2) on the
/// left-continuous censoring KMs.
double pepe_fleming_statistic(const SampleView& sample);

/// |statistic| referred to the imputation-permutation distribution.
TestReport pepe_fleming_test(const SurvivalDataset& data, const PermutationPlan& plan);

}  // namespace konp
