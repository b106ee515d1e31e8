#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "konp/error.hpp"
#include "konp/mvn.hpp"
#include "konp/numeric.hpp"
#include "konp/wlr.hpp"
#include "oracles.hpp"

using konp::SurvivalDataset;

namespace {

SurvivalDataset duplicated_groups() {
  std::vector<double> t;
  std::vector<std::uint8_t> e;
  std::vector<std::string> g;
  const double times[] = {0.7, 1.3, 2.2, 2.9, 4.1, 5.5, 6.0};
  const std::uint8_t events[] = {1, 0, 1, 1, 0, 1, 1};
  for (int i = 0; i < 7; ++i)
    for (const char* label : {"a", "b"}) {
      t.push_back(times[i]);
      e.push_back(events[i]);
      g.push_back(label);
    }
  return SurvivalDataset(t, e, g);
}

// Same records with the group roles exchanged (and so their indices).
SurvivalDataset swapped(const SurvivalDataset& d) {
  std::vector<double> t(d.times().begin(), d.times().end());
  std::vector<std::uint8_t> e(d.events().begin(), d.events().end());
  std::vector<std::uint32_t> g(d.groups().begin(), d.groups().end());
  for (auto& x : g) x = 1 - x;
  return SurvivalDataset(t, e, g, {d.labels()[1], d.labels()[0]});
}

SurvivalDataset shifted_sample(std::uint64_t seed, std::size_t n, double censor) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> x0(1.0), x1(0.6), c(censor);
  std::vector<double> t;
  std::vector<std::uint8_t> e;
  std::vector<std::string> g;
  for (std::size_t i = 0; i < n; ++i) {
    const bool second = i % 2 == 1;
    const double x = second ? x1(gen) : x0(gen);
    const double cc = censor > 0 ? c(gen) : INFINITY;
    t.push_back(std::min(x, cc));
    e.push_back(x <= cc);
    g.push_back(second ? "b" : "a");
  }
  return SurvivalDataset(t, e, g);
}

}  // namespace

TEST(WeightedLogrank, MatchesHypergeometricTally) {
  std::mt19937_64 gen(2);
  for (int rep = 0; rep < 50; ++rep) {
    const auto d = oracle::random_dataset(gen, 8 + rep % 13, 2, 0.3, false);
    for (const auto& [rho, gamma] : konp::kWlrWeights) {
      const auto got = konp::weighted_logrank(d, rho, gamma);
      const auto want = oracle::logrank_tally(d, rho, gamma);
      EXPECT_NEAR(got.statistic, want.g, 1e-12);
      EXPECT_NEAR(got.variance, want.variance, 1e-12);
    }
  }
}

TEST(WeightedLogrank, DuplicatedGroupsGiveZero) {
  const auto d = duplicated_groups();
  for (const auto& [rho, gamma] : konp::kWlrWeights) {
    const auto r = konp::weighted_logrank(d, rho, gamma);
    EXPECT_NEAR(r.statistic, 0.0, 1e-14);
  }
  EXPECT_NEAR(konp::weighted_logrank(d, 0, 0).pvalue, 1.0, 1e-12);
}

TEST(WeightedLogrank, RequiresTwoGroups) {
  const SurvivalDataset d({1, 2, 3}, {1, 1, 1}, {"a", "b", "c"});
  EXPECT_THROW(konp::weighted_logrank(d, 0, 0), konp::ValidationError);
}

TEST(WlrCovariance, DiagonalMatchesSingleStatistics) {
  const auto d = shifted_sample(4, 80, 0.3);
  const auto w = konp::wlr_covariance(d);
  for (std::size_t k = 0; k < 4; ++k) {
    const auto r = konp::weighted_logrank(d, konp::kWlrWeights[k][0], konp::kWlrWeights[k][1]);
    const auto kk = static_cast<Eigen::Index>(k);
    EXPECT_NEAR(w.sigma(kk, kk), r.variance, 1e-12);
    EXPECT_NEAR(w.g[k], r.statistic, 1e-12);
    EXPECT_NEAR(w.z[k], r.z, 1e-12);
  }
}

TEST(WlrCovariance, SymmetricPositiveSemidefinite) {
  std::mt19937_64 gen(6);
  for (int rep = 0; rep < 50; ++rep) {
    const auto d = oracle::random_dataset(gen, 30, 2, 0.4, rep % 2 == 0);
    const auto w = konp::wlr_covariance(d);
    EXPECT_LE((w.sigma - w.sigma.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(w.sigma);
    EXPECT_GE(eig.eigenvalues()(0), -1e-10);
  }
}

TEST(WlrCovariance, GroupSwapFlipsSign) {
  const auto d = shifted_sample(8, 60, 0.4);
  const auto a = konp::wlr_covariance(d);
  const auto b = konp::wlr_covariance(swapped(d));
  for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(a.z[k], -b.z[k], 1e-12);
  EXPECT_NEAR(konp::lee_test(d).pvalue, konp::lee_test(swapped(d)).pvalue, 2e-3);
  EXPECT_NEAR(konp::maxcombo_test(d).pvalue, konp::maxcombo_test(swapped(d)).pvalue, 2e-3);
  EXPECT_NEAR(konp::k_sample_logrank(d, konp::LogrankWeight::unit).statistic,
              konp::k_sample_logrank(swapped(d), konp::LogrankWeight::unit).statistic, 1e-9);
}

TEST(KSampleLogrank, TwoGroupChiSquareIsZSquared) {
  std::mt19937_64 gen(10);
  for (int rep = 0; rep < 30; ++rep) {
    const auto d = oracle::random_dataset(gen, 40, 2, 0.3, rep % 2 == 0);
    const auto w = konp::wlr_covariance(d);
    const auto r = konp::k_sample_logrank(d, konp::LogrankWeight::unit);
    EXPECT_NEAR(r.statistic, w.z[0] * w.z[0], 1e-9);
    EXPECT_NEAR(r.pvalue, konp::weighted_logrank(d, 0, 0).pvalue, 1e-6);
  }
}

TEST(KSampleLogrank, PetoPetoUsesLeftPooledSurvival) {
  std::mt19937_64 gen(12);
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = oracle::random_dataset(gen, 40, 2, 0.3, false);
    const auto r = konp::k_sample_logrank(d, konp::LogrankWeight::pooled_km_left);
    const auto w = konp::weighted_logrank(d, 1, 0);
    EXPECT_NEAR(r.statistic, w.z * w.z, 1e-9);
  }
}

TEST(KSampleLogrank, DuplicatedGroupsGivePOne) {
  std::vector<double> t;
  std::vector<std::uint8_t> e;
  std::vector<std::string> g;
  for (int i = 1; i <= 6; ++i)
    for (const char* label : {"a", "b", "c"}) {
      t.push_back(i);
      e.push_back(i != 4);
      g.push_back(label);
    }
  const SurvivalDataset d(t, e, g);
  for (auto weight : {konp::LogrankWeight::unit, konp::LogrankWeight::pooled_km_left}) {
    const auto r = konp::k_sample_logrank(d, weight);
    EXPECT_NEAR(r.statistic, 0.0, 1e-12);
    EXPECT_NEAR(r.pvalue, 1.0, 1e-9);
  }
}

TEST(KSampleLogrank, GroupWithoutRiskOverlapIsRankDeficient) {
  // Group c is entirely observed after everyone else has failed.
  const SurvivalDataset d({1, 2, 3, 1.5, 2.5, 3.5, 10, 11}, {1, 1, 1, 1, 1, 1, 1, 1},
                          {"a", "a", "a", "b", "b", "b", "c", "c"});
  const auto r = konp::k_sample_logrank(d, konp::LogrankWeight::unit);
  EXPECT_GE(r.pvalue, 0.0);
  EXPECT_LE(r.pvalue, 1.0);
  EXPECT_TRUE(std::isfinite(r.statistic));
}

TEST(Mvn, IndependenceProduct) {
  for (int d = 1; d <= 4; ++d) {
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    const auto size = static_cast<std::size_t>(d);
    const std::vector<double> lo(size, -1.3), hi(size, 1.3);
    const auto r = konp::mvn_rectangle(id, lo, hi);
    const double want = std::pow(2 * oracle::phi_cdf(1.3) - 1, d);
    EXPECT_NEAR(r.probability, want, std::max(3 * r.standard_error, 1e-12));
    EXPECT_LE(r.standard_error, 5e-4);
  }
}

TEST(Mvn, OneDimensionIsExact) {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  const std::vector<double> lo{-0.4}, hi{2.0};
  EXPECT_NEAR(konp::mvn_rectangle(one, lo, hi).probability,
              oracle::phi_cdf(2.0) - oracle::phi_cdf(-0.4), 1e-14);
}

TEST(Mvn, BivariateMatchesQuadrature) {
  for (double rho : {0.5, -0.3, 0.9}) {
    Eigen::MatrixXd c(2, 2);
    c << 1, rho, rho, 1;
    const std::vector<double> lo{-1, -1}, hi{1, 1};
    const auto r = konp::mvn_rectangle(c, lo, hi);
    EXPECT_NEAR(r.probability, oracle::bivariate_box(rho, 1.0),
                std::max(3 * r.standard_error, 1e-6));
  }
}

TEST(Mvn, MonotoneInBounds) {
  Eigen::MatrixXd c(3, 3);
  c << 1, 0.4, 0.2, 0.4, 1, 0.6, 0.2, 0.6, 1;
  double previous = 0;
  for (double b : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const std::vector<double> lo(3, -b), hi(3, b);
    const auto r = konp::mvn_rectangle(c, lo, hi);
    EXPECT_GE(r.probability, previous - 3 * r.standard_error);
    previous = r.probability;
  }
}

TEST(Mvn, SingularMatrixAndErrors) {
  Eigen::MatrixXd c(2, 2);
  c << 1, 1, 1, 1;
  const std::vector<double> lo{-1, -1}, hi{1, 1};
  EXPECT_NEAR(konp::mvn_rectangle(c, lo, hi).probability, 2 * oracle::phi_cdf(1) - 1, 1e-3);
  Eigen::MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_THROW(konp::mvn_rectangle(bad, lo, hi), konp::ValidationError);
}

TEST(Lee, ZeroStatisticsGivePOne) {
  const auto d = duplicated_groups();
  EXPECT_NEAR(konp::lee_test(d).pvalue, 1.0, 1e-12);
  EXPECT_NEAR(konp::maxcombo_test(d).pvalue, 1.0, 1e-12);
}

TEST(Lee, BetweenSingleAndBonferroni) {
  const auto d = shifted_sample(14, 120, 0.5);
  const auto w = konp::wlr_covariance(d);
  const auto r = konp::lee_test(d);
  const double c = std::max(std::abs(w.z[1]), std::abs(w.z[2]));
  const double single = 2 * (1 - oracle::phi_cdf(c));
  EXPECT_GE(r.pvalue, single - 2e-3);
  EXPECT_LE(r.pvalue, 2 * single + 2e-3);
}

TEST(MaxCombo, AtLeastLeeStatistic) {
  const auto d = shifted_sample(16, 150, 0.3);
  const auto lee = konp::lee_test(d);
  const auto mc = konp::maxcombo_test(d);
  EXPECT_GE(mc.statistic, lee.statistic);
  EXPECT_GT(mc.pvalue, 0.0);
  EXPECT_LE(mc.pvalue, 1.0);
}

TEST(PepeFleming, UncensoredIsIntegratedSurvivalDifference) {
  std::mt19937_64 gen(18);
  for (int rep = 0; rep < 30; ++rep) {
    const auto d = oracle::random_dataset(gen, 20 + rep, 2, 0.0, rep % 2 == 0);
    double last[2] = {0, 0};
    for (std::size_t i = 0; i < d.size(); ++i)
      last[d.groups()[i]] = std::max(last[d.groups()[i]], d.times()[i]);
    const double h = std::min(last[0], last[1]);
    // For an empirical distribution the integral of S over [0, h] is E min(T, h).
    double mean[2] = {0, 0};
    for (std::size_t i = 0; i < d.size(); ++i) {
      const auto g = d.groups()[i];
      mean[g] += std::min(d.times()[i], h) / static_cast<double>(d.group_size(g));
    }
    EXPECT_NEAR(konp::pepe_fleming_statistic(d.view()), mean[0] - mean[1], 1e-12);
  }
}

TEST(PepeFleming, DuplicatedGroupsGiveZero) {
  EXPECT_NEAR(konp::pepe_fleming_statistic(duplicated_groups().view()), 0.0, 1e-14);
}

TEST(PepeFleming, PermutationReport) {
  const auto d = shifted_sample(20, 60, 0.4);
  const auto r = konp::pepe_fleming_test(d, {1, 200, 3});
  EXPECT_EQ(r.method, "pepe_fleming");
  EXPECT_EQ(r.replicates, 200u);
  EXPECT_GE(r.pvalue, 0.0);
  EXPECT_LE(r.pvalue, 1.0);
}
