#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "konp/numeric.hpp"
#include "konp/rng.hpp"

using konp::philox4x32;
using konp::RandomStream;

// Known-answer vectors published with Random123.
TEST(Philox, KnownAnswerZero) {
  const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                              {0xffffffff, 0xffffffff});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                              {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(RandomStream, SameIdSameSequence) {
  RandomStream a(42, {1, 2, 3});
  RandomStream b(42, {1, 2, 3});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(RandomStream, DistinctIdsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint32_t a = 0; a < 50; ++a)
    for (std::uint32_t c = 0; c < 20; ++c) firsts.insert(RandomStream(7, {a, 0, c})());
  EXPECT_EQ(firsts.size(), 1000u);
}

TEST(RandomStream, UniformRanges) {
  RandomStream rng(3);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const double v = rng.uniform_open();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
}

TEST(RandomStream, BelowIsUnbiased) {
  RandomStream rng(11);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto x = rng.below(7);
    ASSERT_LT(x, 7u);
    ++counts[x];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 4 * std::sqrt(n / 7.0));
}

TEST(ParallelFor, CoversEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  konp::parallel_for(hits.size(), 4, [&](std::size_t i, unsigned) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(ParallelFor, RethrowsWorkerException) {
  EXPECT_THROW(konp::parallel_for(100, 3,
                                  [](std::size_t i, unsigned) {
                                    if (i == 57) throw std::runtime_error("boom");
                                  }),
               std::runtime_error);
}

TEST(Numeric, NormalTails) {
  EXPECT_NEAR(konp::normal_cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(konp::normal_sf(5.0), 2.866515718791939e-07, 1e-18);
  EXPECT_NEAR(konp::chi_square_sf(3.841458820694124, 1), 0.05, 1e-12);
}
