#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "konp/error.hpp"
#include "konp/permute.hpp"
#include "konp/statistic.hpp"
#include "oracles.hpp"

using konp::ImputationModel;
using konp::PermutationPlan;
using konp::ReplicateSample;
using konp::SurvivalDataset;

namespace {

std::vector<konp::StatisticValue> konp_values(const konp::SampleView& s) {
  thread_local konp::KonpWorkspace ws;
  const auto r = ws.evaluate(s, {true, true, false});
  return {{r.q_pearson, r.degenerate}, {r.q_lr, r.degenerate}};
}

const std::vector<std::string> kNames{"konp_p", "konp_lr"};

}  // namespace

TEST(PermuteLabels, IsAPermutation) {
  const std::vector<std::uint32_t> g{0, 0, 1, 1, 1, 2, 2};
  konp::RandomStream rng(4);
  std::vector<std::uint32_t> out;
  for (int r = 0; r < 50; ++r) {
    konp::permute_labels(g, rng, out);
    auto sorted = out;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, g);
  }
}

TEST(PermuteLabels, UniformOverArrangements) {
  const std::vector<std::uint32_t> g{0, 1, 2};
  std::map<std::vector<std::uint32_t>, int> counts;
  std::vector<std::uint32_t> out;
  const int n = 60000;
  for (int r = 0; r < n; ++r) {
    auto rng = konp::permutation_stream(9, 0, static_cast<std::size_t>(r));
    konp::permute_labels(g, rng, out);
    ++counts[out];
  }
  ASSERT_EQ(counts.size(), 6u);
  for (const auto& [perm, c] : counts) EXPECT_NEAR(c, n / 6.0, 4 * std::sqrt(n / 6.0));
}

TEST(Impute, IdentityPermutationKeepsData) {
  std::mt19937_64 gen(3);
  const auto d = oracle::random_dataset(gen, 40, 3, 0.4, false);
  const ImputationModel model(d);
  ReplicateSample out;
  konp::impute_replicate(d, d.groups(), model, 1, 0, 0, out);
  EXPECT_TRUE(std::equal(out.times.begin(), out.times.end(), d.times().begin()));
  EXPECT_TRUE(std::equal(out.events.begin(), out.events.end(), d.events().begin()));
}

TEST(Impute, OnlyMovedRecordsChange) {
  std::mt19937_64 gen(5);
  const auto d = oracle::random_dataset(gen, 60, 3, 0.4, false);
  const ImputationModel model(d);
  ReplicateSample out;
  std::vector<std::uint32_t> labels;
  for (std::size_t b = 0; b < 50; ++b) {
    auto rng = konp::permutation_stream(8, 0, b);
    konp::permute_labels(d.groups(), rng, labels);
    konp::impute_replicate(d, labels, model, 8, 0, b, out);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (labels[i] == d.groups()[i]) {
        EXPECT_EQ(out.times[i], d.times()[i]);
        EXPECT_EQ(out.events[i], d.events()[i]);
      } else if (d.events()[i]) {
        EXPECT_LE(out.times[i], d.times()[i]);
      }
    }
  }
}

TEST(Impute, PointMassCensoringTruncatesEvents) {
  // Group b is censored only at 2.5, so its censoring curve is a point mass.
  const SurvivalDataset d({1, 2, 3, 4, 2.5, 0.5}, {1, 1, 1, 1, 0, 1},
                          {"a", "a", "a", "a", "b", "b"});
  const ImputationModel model(d);
  ASSERT_EQ(model.censoring_curve(1).size(), 1u);
  const std::vector<std::uint32_t> labels{1, 0, 0, 1, 0, 0};
  ReplicateSample out;
  for (std::size_t b = 0; b < 20; ++b) {
    konp::impute_replicate(d, labels, model, 3, 0, b, out);
    EXPECT_EQ(out.times[0], 1.0);
    EXPECT_EQ(out.events[0], 1);
    EXPECT_EQ(out.times[3], 2.5);
    EXPECT_EQ(out.events[3], 0);
  }
}

TEST(Impute, NeverCensoringGroupGivesEvents) {
  const SurvivalDataset d({1, 2, 3, 4, 5, 6}, {1, 1, 1, 1, 0, 1}, {"a", "a", "a", "b", "b", "b"});
  const ImputationModel model(d);
  EXPECT_TRUE(model.never_censors(0));
  EXPECT_FALSE(model.never_censors(1));
  const std::vector<std::uint32_t> labels{0, 0, 1, 1, 0, 1};
  ReplicateSample out;
  for (std::size_t b = 0; b < 200; ++b) {
    konp::impute_replicate(d, labels, model, 5, 0, b, out);
    // Record 4 is censored at 5; beyond it the only failure is 6 with mass one.
    EXPECT_EQ(out.times[4], 6.0);
    EXPECT_EQ(out.events[4], 1);
  }
}

TEST(Impute, SyntheticTailIsNeverAnEvent) {
  // Record 2 is censored at the largest time, so its conditional curve is empty
  // and every draw hits the synthetic tail.
  const SurvivalDataset d({1, 2, 9, 3, 4}, {1, 1, 0, 1, 1}, {"a", "a", "a", "b", "b"});
  const ImputationModel model(d);
  EXPECT_TRUE(model.conditional_curve(2).empty());
  EXPECT_DOUBLE_EQ(model.failure_tail(), 4.0 + konp::synthetic_tail_epsilon(9.0));
  const std::vector<std::uint32_t> labels{0, 0, 1, 0, 1};
  ReplicateSample out;
  for (std::size_t b = 0; b < 20; ++b) {
    konp::impute_replicate(d, labels, model, 1, 0, b, out);
    EXPECT_EQ(out.events[2], 0);
    EXPECT_DOUBLE_EQ(out.times[2], model.failure_tail());
  }
}

TEST(Impute, ConditionalCurveIsBeyondThreshold) {
  const SurvivalDataset d({1, 2, 3, 4, 5, 6}, {1, 0, 1, 0, 1, 1}, {"a", "b", "a", "b", "a", "b"});
  const ImputationModel model(d);
  const auto& c = model.conditional_curve(1);
  EXPECT_EQ(c.jump_times.front(), 3.0);
  EXPECT_THROW(model.conditional_curve(0), konp::ValidationError);
}

TEST(PermutationPvalue, ConstantStatisticGivesOne) {
  std::mt19937_64 gen(7);
  const auto d = oracle::random_dataset(gen, 30, 2, 0.3, false);
  const std::vector<std::string> names{"c"};
  const auto r = konp::permutation_pvalue(
      d, [](const konp::SampleView&) { return std::vector<konp::StatisticValue>{{1.5, false}}; },
      names, {2, 50, 1});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].pvalue, 1.0);
  EXPECT_EQ(r[0].replicates, 100u);
}

TEST(PermutationPvalue, AddOneRule) {
  std::mt19937_64 gen(7);
  const auto d = oracle::random_dataset(gen, 30, 2, 0.3, false);
  const std::vector<std::string> names{"c"};
  PermutationPlan plan{1, 99, 1, konp::PValueRule::add_one};
  const auto r = konp::permutation_pvalue(
      d,
      [](const konp::SampleView& s) {
        return std::vector<konp::StatisticValue>{{s.times[0] == 12345 ? 0.0 : -1.0, false}};
      },
      names, plan);
  EXPECT_DOUBLE_EQ(r[0].pvalue, 1.0);
}

TEST(PermutationPvalue, DegenerateObservedGivesOne) {
  const SurvivalDataset d({1, 5, 2, 6}, {1, 0, 1, 0}, {"a", "a", "b", "b"});
  const auto r = konp::permutation_pvalue(d, konp_values, kNames, {1, 20, 1});
  for (const auto& rep : r) {
    EXPECT_TRUE(rep.degenerate);
    EXPECT_EQ(rep.pvalue, 1.0);
  }
}

TEST(PermutationPvalue, IndependentOfThreadCount) {
  std::mt19937_64 gen(11);
  const auto d = oracle::random_dataset(gen, 40, 3, 0.3, false);
  PermutationPlan plan{2, 100, 77};
  plan.threads = 1;
  const auto a = konp::permutation_pvalue(d, konp_values, kNames, plan);
  plan.threads = 4;
  const auto b = konp::permutation_pvalue(d, konp_values, kNames, plan);
  for (std::size_t q = 0; q < a.size(); ++q) {
    EXPECT_EQ(a[q].pvalue, b[q].pvalue);
    EXPECT_EQ(a[q].statistic, b[q].statistic);
  }
  plan.seed = 78;
  const auto c = konp::permutation_pvalue(d, konp_values, kNames, plan);
  EXPECT_EQ(c[0].statistic, a[0].statistic);
}

TEST(PermutationPvalue, StrongSignalIsSmall) {
  std::vector<double> t;
  std::vector<std::uint8_t> e;
  std::vector<std::string> g;
  for (int i = 0; i < 25; ++i) {
    t.push_back(1 + i * 0.01);
    e.push_back(1);
    g.push_back("a");
    t.push_back(5 + i * 0.37);
    e.push_back(i % 5 != 0);
    g.push_back("b");
  }
  const SurvivalDataset d(t, e, g);
  const auto r = konp::permutation_pvalue(d, konp_values, kNames, {1, 200, 2});
  EXPECT_LT(r[0].pvalue, 0.02);
  EXPECT_LT(r[1].pvalue, 0.02);
}

TEST(Cauchy, EqualInputsReturnThemselves) {
  for (double p : {0.5, 0.01, 0.3, 0.97}) {
    const std::vector<double> ps{p, p, p};
    EXPECT_NEAR(konp::cauchy_combination(ps), p, 1e-12);
  }
}

TEST(Cauchy, PublishedCombination) {
  const std::vector<double> ps{0.0109, 0.0108, 0.6350};
  EXPECT_NEAR(konp::cauchy_combination(ps), 0.0164, 5e-5);
}

TEST(Cauchy, BoundaryInputs) {
  const std::vector<double> ps{0.0, 0.5};
  EXPECT_THROW(konp::cauchy_combination(ps), konp::ValidationError);
  const double p = konp::cauchy_combination(ps, 999);
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 0.01);
  const std::vector<double> bad{1.2};
  EXPECT_THROW(konp::cauchy_combination(bad), konp::ValidationError);
}
