// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "qctsp/rng.hpp"
#include "qctsp/stats.hpp"

using namespace qctsp;

TEST(ApproximationRatio, PaperAnchors) {
  EXPECT_NEAR(approximation_ratio(67889.0, 34612.9), 1.9614, 1e-4);
  EXPECT_NEAR(approximation_ratio(35605.4, 34612.9), 1.0287, 1e-4);
  EXPECT_DOUBLE_EQ(approximation_ratio(123.4, 123.4), 1.0);
  EXPECT_THROW(approximation_ratio(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(approximation_ratio(1.0, -2.0), std::invalid_argument);
}

TEST(PercentGap, PaperAnchors) {
  EXPECT_NEAR(percent_gap(1.0287), 2.87, 1e-9);
  EXPECT_DOUBLE_EQ(percent_gap(1.0), 0.0);
  EXPECT_NEAR(percent_gap(0.9418), -5.82, 1e-9);
  EXPECT_THROW(percent_gap(std::numeric_limits<double>::infinity()),
               std::invalid_argument);
}

TEST(Summarize, HandComputableTriple) {
  Rng rng(1);
  const auto s = summarize({1.0, 2.0, 3.0}, rng);
  EXPECT_DOUBLE_EQ(s.median, 2.0);
  EXPECT_DOUBLE_EQ(s.sd, 1.0);
  EXPECT_DOUBLE_EQ(s.q1, 1.5);
  EXPECT_DOUBLE_EQ(s.q3, 2.5);
  EXPECT_DOUBLE_EQ(s.iqr, 1.0);
  EXPECT_EQ(s.samples, 3u);
}

TEST(Summarize, ConstantSamplesCollapse) {
  Rng rng(2);
  const auto s = summarize({4.2, 4.2, 4.2, 4.2}, rng);
  EXPECT_DOUBLE_EQ(s.median, 4.2);
  EXPECT_DOUBLE_EQ(s.iqr, 0.0);
  EXPECT_DOUBLE_EQ(s.sd, 0.0);
  EXPECT_DOUBLE_EQ(s.ci_lo, 4.2);
  EXPECT_DOUBLE_EQ(s.ci_hi, 4.2);
}

TEST(Summarize, SingleSampleHasZeroSpread) {
  Rng rng(3);
  const auto s = summarize({9.0}, rng);
  EXPECT_DOUBLE_EQ(s.median, 9.0);
  EXPECT_DOUBLE_EQ(s.sd, 0.0);
  EXPECT_DOUBLE_EQ(s.ci_lo, 9.0);
  EXPECT_DOUBLE_EQ(s.ci_hi, 9.0);
}

TEST(Summarize, RejectsEmptyInput) {
  Rng rng(4);
  EXPECT_THROW(summarize({}, rng), std::invalid_argument);
}

TEST(Summarize, QuartilesInterpolateLinearly) {
  Rng rng(5);
  const auto s = summarize({10.0, 20.0, 30.0, 40.0}, rng);
  EXPECT_DOUBLE_EQ(s.median, 25.0);
  EXPECT_DOUBLE_EQ(s.q1, 17.5);
  EXPECT_DOUBLE_EQ(s.q3, 32.5);
}

TEST(Summarize, OrderingInvariants) {
  Rng meta(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v;
    const int n = 2 + static_cast<int>(meta.next_below(40));
    for (int i = 0; i < n; ++i) v.push_back(meta.next_double() * 100.0);
    Rng rng(100 + static_cast<std::uint64_t>(trial));
    const auto s = summarize(v, rng, 2000);
    EXPECT_LE(s.q1, s.median);
    EXPECT_LE(s.median, s.q3);
    EXPECT_LE(s.ci_lo, s.ci_hi);
    EXPECT_GE(s.iqr, 0.0);
    EXPECT_GE(s.sd, 0.0);
  }
}

TEST(Summarize, BootstrapCiCoversTrueMedian) {
  // 500 uniform draws per trial; the true median is 0.5
  Rng meta(7);
  int covered = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> v(500);
    for (auto& x : v) x = meta.next_double();
    Rng rng(1000 + static_cast<std::uint64_t>(t));
    const auto s = summarize(v, rng, 3000);
    if (s.ci_lo <= 0.5 && 0.5 <= s.ci_hi) ++covered;
  }
  EXPECT_GE(covered, 90) << "covered in " << covered << "/" << trials;
}

TEST(Summarize, DeterministicUnderSeed) {
  std::vector<double> v{3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0};
  Rng r1(42), r2(42);
  const auto a = summarize(v, r1);
  const auto b = summarize(v, r2);
  EXPECT_DOUBLE_EQ(a.ci_lo, b.ci_lo);
  EXPECT_DOUBLE_EQ(a.ci_hi, b.ci_hi);
}
