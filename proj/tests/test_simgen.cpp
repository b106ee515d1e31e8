#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "konp/error.hpp"
#include "konp/power.hpp"
#include "konp/scenarios.hpp"

using konp::Distribution;
using konp::RandomStream;

TEST(Distribution, ExponentialMean) {
  const auto d = Distribution::parse("exp(1)");
  RandomStream rng(1);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += d.sample(rng);
  EXPECT_NEAR(sum / n, 1.0, 4.0 / std::sqrt(n));
}

TEST(Distribution, MinimumRespectsSupport) {
  const auto d = Distribution::parse("min(unif(0,10),exp(0.85))");
  EXPECT_EQ(d.kind(), Distribution::Kind::minimum);
  RandomStream rng(2);
  for (int i = 0; i < 20000; ++i) {
    const double x = d.sample(rng);
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 10.0);
  }
  EXPECT_NEAR(d.survival(2.0), 0.8 * std::exp(-1.7), 1e-14);
}

TEST(Distribution, PiecewiseExponentialSurvival) {
  const auto d = Distribution::parse("pwexp(0.1,0.45;1,1.7,0.5)");
  EXPECT_NEAR(d.survival(0.1), std::exp(-0.1), 1e-14);
  EXPECT_NEAR(d.survival(0.3), std::exp(-0.1 - 1.7 * 0.2), 1e-14);
  EXPECT_NEAR(d.survival(2.0), std::exp(-0.1 - 1.7 * 0.35 - 0.5 * 1.55), 1e-14);
}

TEST(Distribution, PiecewiseExponentialGoodnessOfFit) {
  const auto d = Distribution::parse("pwexp(0.1,0.45;1,1.7,0.5)");
  const std::vector<double> edges{0.0, 0.1, 0.45, 1.0, 2.0, INFINITY};
  std::vector<int> counts(edges.size() - 1, 0);
  RandomStream rng(3);
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double x = d.sample(rng);
    for (std::size_t b = 0; b + 1 < edges.size(); ++b)
      if (x > edges[b] && x <= edges[b + 1]) ++counts[b];
  }
  double chi2 = 0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const double upper = std::isinf(edges[b + 1]) ? 0.0 : d.survival(edges[b + 1]);
    const double expected = n * (d.survival(edges[b]) - upper);
    chi2 += (counts[b] - expected) * (counts[b] - expected) / expected;
  }
  // 99.9% point of chi-square with 4 degrees of freedom.
  EXPECT_LT(chi2, 18.47);
}

TEST(Distribution, PiecewiseWeibullIsContinuous) {
  const auto d = Distribution::parse("pwweibull(0.5;4,1;2,1.5)");
  const double below = d.survival(0.5 - 1e-9), above = d.survival(0.5 + 1e-9);
  EXPECT_NEAR(below, above, 1e-7);
  EXPECT_NEAR(d.survival(0.5), std::exp(-std::pow(0.5, 4)), 1e-14);
  const double h = std::pow(0.5, 4) + std::pow(1.0 / 1.5, 2) - std::pow(0.5 / 1.5, 2);
  EXPECT_NEAR(d.survival(1.0), std::exp(-h), 1e-14);
}

TEST(Distribution, Conventions) {
  EXPECT_NEAR(Distribution::parse("weibull(0.849,20)").survival(20), std::exp(-1.0), 1e-14);
  EXPECT_NEAR(Distribution::parse("loglogistic(1,1)").survival(3), 0.25, 1e-14);
  EXPECT_NEAR(Distribution::parse("lomax(2,1)").survival(1), 0.25, 1e-14);
  EXPECT_NEAR(Distribution::parse("lognormal(0,1)").survival(1), 0.5, 1e-14);
  EXPECT_EQ(Distribution::parse("never").survival(1e300), 1.0);
  EXPECT_EQ(Distribution::parse("point(3)").survival(2.9), 1.0);
  EXPECT_EQ(Distribution::parse("point(3)").survival(3), 0.0);
}

TEST(Distribution, TextRoundTrip) {
  for (const char* text : {"exp(0.5)", "weibull(0.849,20)", "loglogistic(1,0.36787944117144233)",
                           "lognormal(1.1,0.5)", "unif(0,10)", "lomax(0.6,1)",
                           "pwexp(0.1,0.45;1,1.7,0.5)", "pwweibull(0.5;4,1;2,1.5)",
                           "min(exp(0.85),unif(0,10))", "never", "point(3)"}) {
    const auto d = Distribution::parse(text);
    EXPECT_EQ(Distribution::parse(d.to_string()), d) << text;
  }
}

TEST(Distribution, RejectsInvalidSpecs) {
  for (const char* text : {"exp(-1)", "unif(3,1)", "weibull(1)", "pwexp(1,0.5;1,1,1)", "foo(1)",
                           "exp(1", "min(exp(1))"}) {
    EXPECT_THROW(Distribution::parse(text), konp::ValidationError) << text;
  }
}

TEST(Scenarios, RegistryContents) {
  const auto names = konp::scenario_names();
  for (const char* want : {"null-k3", "null-k4", "null-k5", "D-k3", "D-k2", "J2-k3", "J2-k2", "L",
                           "M", "N", "O", "P", "Q"})
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
  for (const auto& family : konp::scenario_registry())
    for (const auto& variant : family.censoring_variants()) family.resolve(variant).validate();
  EXPECT_THROW(konp::find_scenario("nope"), konp::ValidationError);
}

TEST(Scenarios, DGroupsTwoAndThreeShareTheirLaw) {
  const auto spec = konp::find_scenario("D-k3").resolve("equal_25");
  ASSERT_EQ(spec.k, 3u);
  EXPECT_EQ(spec.failure[1], spec.failure[2]);
  EXPECT_EQ(spec.censoring[1], spec.censoring[2]);
  EXPECT_FALSE(spec.failure[0] == spec.failure[1]);
}

TEST(Scenarios, NullK3CensoringRate) {
  const auto spec = konp::find_scenario("null-k3").resolve("equal_25");
  RandomStream rng(5);
  std::size_t censored = 0, total = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const auto d = konp::generate_dataset(spec, 300, rng);
    for (auto e : d.events()) censored += e == 0;
    total += d.size();
  }
  EXPECT_NEAR(static_cast<double>(censored) / static_cast<double>(total), 0.25, 0.03);
}

TEST(Scenarios, NeverCensoringGivesAllEvents) {
  konp::ScenarioSpec spec{"x", 2,
                          {Distribution::exponential(1), Distribution::exponential(2)},
                          {Distribution::never(), Distribution::never()},
                          {0.5, 0.5}};
  RandomStream rng(6);
  const auto d = konp::generate_dataset(spec, 50, rng);
  for (auto e : d.events()) EXPECT_EQ(e, 1);
  EXPECT_EQ(d.labels(), (std::vector<std::string>{"1", "2"}));
  EXPECT_EQ(d.group_size(0), 25u);
}

TEST(Scenarios, AllocateGroupsLargestRemainder) {
  EXPECT_EQ(konp::allocate_groups(100, {1.0 / 3, 1.0 / 3, 1.0 / 3}),
            (std::vector<std::size_t>{34, 33, 33}));
  EXPECT_EQ(konp::allocate_groups(10, {0.25, 0.75}), (std::vector<std::size_t>{3, 7}));
}

TEST(Scenarios, ParseDeclarativeFile) {
  std::istringstream in(R"(# two families
[scenario toy]
description = toy example
k = 2
failure.1 = exp(1)
failure.2 = weibull(1.5,1)
censoring.equal_25.1 = unif(0,3)
censoring.equal_25.2 = unif(0,3)
fractions = 0.4, 0.6

[scenario plain]
k = 2
failure.1 = exp(1)
failure.2 = exp(1)
censoring.1 = never
censoring.2 = never
)");
  const auto families = konp::parse_scenarios(in);
  ASSERT_EQ(families.size(), 2u);
  EXPECT_EQ(families[0].name, "toy");
  EXPECT_EQ(families[0].censoring_variants(), (std::vector<std::string>{"equal_25"}));
  const auto spec = families[0].resolve("equal_25");
  EXPECT_EQ(spec.failure[1], Distribution::weibull(1.5, 1));
  EXPECT_EQ(spec.fractions, (std::vector<double>{0.4, 0.6}));
  EXPECT_EQ(families[1].censoring_variants(), (std::vector<std::string>{"default"}));
  EXPECT_THROW(families[0].resolve("equal_50"), konp::ValidationError);
}

TEST(Scenarios, ParseErrors) {
  for (const char* text : {"k = 2\n", "[scenario x]\nk = 2\nfailure.1 = exp(1)\n",
                           "[scenario x]\nk = 2\nfailure.3 = exp(1)\n",
                           "[scenario x]\nbogus line\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(konp::parse_scenarios(in), konp::ValidationError) << text;
  }
}

TEST(Power, DeterministicAndBounded) {
  konp::PowerOptions options;
  options.sizes = {40};
  options.replications = 12;
  options.plan = {1, 50, 1};
  options.methods = {konp::Method::konp_p, konp::Method::logrank};
  options.seed = 9;
  options.threads = 1;
  const auto& family = konp::find_scenario("D-k2");
  const auto a = konp::run_power_study(family, options);
  options.threads = 3;
  const auto b = konp::run_power_study(family, options);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].rejection_rate, b[i].rejection_rate);
    EXPECT_EQ(a[i].censoring_rate, b[i].censoring_rate);
    EXPECT_GE(a[i].rejection_rate, 0.0);
    EXPECT_LE(a[i].rejection_rate, 1.0);
    const double r = a[i].rejection_rate;
    EXPECT_NEAR(a[i].mc_se, std::sqrt(r * (1 - r) / 12), 1e-15);
  }
  EXPECT_NE(konp::replication_seed(1, 100, 0), konp::replication_seed(1, 100, 1));
  EXPECT_NE(konp::replication_seed(1, 100, 0), konp::replication_seed(1, 200, 0));
}

TEST(Power, BenchmarkCensoringCalibration) {
  for (double target : {0.25, 0.5}) {
    const double lambda = konp::exponential_censoring_rate(target);
    // P(C < X) = integral of lambda exp(-lambda c) / (1 + c), by the midpoint rule.
    const int steps = 400000;
    const double upper = 60.0 / lambda, h = upper / steps;
    double p = 0;
    for (int i = 0; i < steps; ++i) {
      const double c = (i + 0.5) * h;
      p += lambda * std::exp(-lambda * c) / (1 + c) * h;
    }
    EXPECT_NEAR(p, target, 1e-6);
    const auto d = konp::benchmark_dataset(4000, target, target, 11);
    std::size_t censored = 0;
    for (auto e : d.events()) censored += e == 0;
    EXPECT_NEAR(static_cast<double>(censored) / 4000.0, target, 0.03);
  }
}
