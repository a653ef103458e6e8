// Copyright 2026 The Mentum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include "mentum/error.h"
#include "mentum/stats.h"

namespace mentum {
namespace {

using V = std::vector<double>;

// Brute-force permutation p for the rank-sum statistic on untied data.
double brute_rank_sum_p(const V& x, const V& y) {
  V pooled = x;
  pooled.insert(pooled.end(), y.begin(), y.end());
  const auto ranks = midranks(pooled);
  const std::size_t n = pooled.size();
  double observed = 0;
  for (std::size_t i = 0; i < x.size(); ++i) observed += ranks[i];
  double lower = 0, upper = 0, total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != x.size()) continue;
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) s += ranks[i];
    }
    total += 1;
    lower += s <= observed + 1e-9;
    upper += s >= observed - 1e-9;
  }
  return std::min(1.0, 2 * std::min(lower, upper) / total);
}

// Brute-force sign-flip p for the signed-rank statistic.
double brute_signed_rank_p(const V& d) {
  V mag;
  for (double v : d) mag.push_back(std::abs(v));
  const auto ranks = midranks(mag);
  double observed = 0;
  for (std::size_t i = 0; i < d.size(); ++i) observed += d[i] > 0 ? ranks[i] : 0;
  double lower = 0, upper = 0;
  const std::uint32_t total = 1u << d.size();
  for (std::uint32_t mask = 0; mask < total; ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (mask & (1u << i)) s += ranks[i];
    }
    lower += s <= observed + 1e-9;
    upper += s >= observed - 1e-9;
  }
  return std::min(1.0, 2 * std::min(lower, upper) / total);
}

TEST(Descriptive, MeanSdSem) {
  const V v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(v), 5.0);
  EXPECT_NEAR(sample_sd(v), std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_NEAR(sem(v), std::sqrt(32.0 / 7.0) / std::sqrt(8.0), 1e-12);
  EXPECT_EQ(sem(V{3}), 0.0);
  EXPECT_THROW(mean(V{}), AnalysisError);
  EXPECT_THROW(sample_sd(V{1}), AnalysisError);
}

TEST(Midranks, TiesShareAverage) {
  EXPECT_EQ(midranks(V{10, 20, 20, 30, 10}), (V{1.5, 3.5, 3.5, 5, 1.5}));
}

TEST(RankSum, SmallExactValues) {
  EXPECT_DOUBLE_EQ(wilcoxon_rank_sum(V{1, 2, 3}, V{4, 5, 6}).p_value, 0.1);
  EXPECT_DOUBLE_EQ(wilcoxon_rank_sum(V{4, 5, 6}, V{1, 2, 3}).p_value, 0.1);
  EXPECT_DOUBLE_EQ(wilcoxon_rank_sum(V{1, 4}, V{2, 3}).p_value, 1.0);
  const auto r = wilcoxon_rank_sum(V{1, 2, 3, 4, 5, 6, 7, 8}, V{9, 10, 11, 12, 13, 14, 15, 16});
  EXPECT_TRUE(r.exact);
  EXPECT_DOUBLE_EQ(r.statistic, 36.0);
  EXPECT_NEAR(r.p_value, 2.0 / 12870.0, 1e-15);
}

TEST(RankSum, MatchesBruteForce) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0, 1);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n1 = 1 + rng() % 8, n2 = 1 + rng() % 8;
    V x, y;
    for (std::size_t i = 0; i < n1; ++i) x.push_back(g(rng) + 0.5);
    for (std::size_t i = 0; i < n2; ++i) y.push_back(g(rng));
    ASSERT_NEAR(wilcoxon_rank_sum(x, y).p_value, brute_rank_sum_p(x, y), 1e-12);
  }
}

TEST(RankSum, LargeSamplesUseNormalApproximation) {
  V x, y;
  for (int i = 0; i < 15; ++i) {
    x.push_back(i);
    y.push_back(i + 0.5);
  }
  const auto r = wilcoxon_rank_sum(x, y);
  EXPECT_FALSE(r.exact);
  EXPECT_GT(r.p_value, 0.5);
  EXPECT_THROW(wilcoxon_rank_sum(V{}, V{1}), AnalysisError);
}

TEST(RankSum, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.1, 10);
  for (int round = 0; round < 100; ++round) {
    V x, y;
    for (int i = 0; i < 6; ++i) x.push_back(u(rng));
    for (int i = 0; i < 7; ++i) y.push_back(u(rng) * 1.3);
    auto f = [](V v) {
      for (auto& e : v) e = std::exp(e) + 3 * e;
      return v;
    };
    EXPECT_DOUBLE_EQ(wilcoxon_rank_sum(x, y).p_value, wilcoxon_rank_sum(f(x), f(y)).p_value);
  }
}

TEST(SignedRank, SmallExactValues) {
  EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(V{2, 3, 4, 5, 6}, V{1, 1, 1, 1, 1}).p_value, 0.0625);
  EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(V{1, 0}, V{0, 1}).p_value, 1.0);
  EXPECT_THROW(wilcoxon_signed_rank(V{1, 2}, V{1, 2}), AnalysisError);
  EXPECT_THROW(wilcoxon_signed_rank(V{1, 2}, V{1}), AnalysisError);
}

TEST(SignedRank, ZeroHandling) {
  const V x{5, 1, 2, 3, 4, 6};
  const V y{5, 0, 0, 0, 0, 0};
  const auto dropped = wilcoxon_signed_rank(x, y);
  EXPECT_EQ(dropped.n, 5u);
  EXPECT_DOUBLE_EQ(dropped.p_value, 0.0625);
  const auto pratt = wilcoxon_signed_rank(x, y, ZeroDifferences::kPratt);
  EXPECT_EQ(pratt.n, 5u);
  EXPECT_DOUBLE_EQ(pratt.statistic, 2 + 3 + 4 + 5 + 6);
}

TEST(SignedRank, MatchesBruteForce) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.3, 1);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 1 + rng() % 12;
    V x, y, d;
    for (std::size_t i = 0; i < n; ++i) {
      // Rounded to force some ties.
      x.push_back(std::round(4 * g(rng)) / 4);
      y.push_back(0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] != 0) d.push_back(x[i]);
    }
    if (d.empty()) continue;
    ASSERT_NEAR(wilcoxon_signed_rank(x, y).p_value, brute_signed_rank_p(d), 1e-12);
  }
}

TEST(SignedRank, InvariantUnderPositiveScaling) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.2, 1);
  for (int round = 0; round < 100; ++round) {
    V x, y;
    for (int i = 0; i < 10; ++i) {
      x.push_back(g(rng));
      y.push_back(g(rng));
    }
    V x2 = x, y2 = y;
    for (auto& v : x2) v = 7.5 * v + 2;
    for (auto& v : y2) v = 7.5 * v + 2;
    EXPECT_DOUBLE_EQ(wilcoxon_signed_rank(x, y).p_value, wilcoxon_signed_rank(x2, y2).p_value);
  }
}

TEST(SignedRank, LargeSampleApproximationIsClose) {
  V x, y;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0, 1);
  for (int i = 0; i < 30; ++i) {
    x.push_back(g(rng) + 0.4);
    y.push_back(g(rng));
  }
  const auto r = wilcoxon_signed_rank(x, y);
  EXPECT_FALSE(r.exact);
  EXPECT_GT(r.p_value, 0.0);
  EXPECT_LT(r.p_value, 1.0);
}

TEST(IncompleteBeta, ReferenceValues) {
  EXPECT_DOUBLE_EQ(regularized_incomplete_beta(1, 1, 0.3), 0.3);
  EXPECT_NEAR(regularized_incomplete_beta(2, 3, 0.4), 0.5248, 1e-12);
  EXPECT_NEAR(regularized_incomplete_beta(0.5, 0.5, 0.5), 0.5, 1e-12);
  EXPECT_EQ(regularized_incomplete_beta(3, 4, 0), 0.0);
  EXPECT_EQ(regularized_incomplete_beta(3, 4, 1), 1.0);
  EXPECT_THROW(regularized_incomplete_beta(0, 1, 0.5), AnalysisError);
  EXPECT_THROW(regularized_incomplete_beta(1, 1, 1.5), AnalysisError);
}

TEST(IncompleteBeta, AgreesWithBoost) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> ab(0.2, 60), x(0, 1);
  for (int i = 0; i < 2000; ++i) {
    const double a = ab(rng), b = ab(rng), v = x(rng);
    const double ref = boost::math::ibeta(a, b, v);
    ASSERT_NEAR(regularized_incomplete_beta(a, b, v), ref, 1e-10 + 1e-9 * ref) << a << " " << b << " " << v;
  }
}

TEST(FDistribution, KnownQuantiles) {
  // Upper 5% points of F.
  EXPECT_NEAR(f_distribution_sf(4.0517, 1, 46), 0.05, 1e-4);
  EXPECT_NEAR(f_distribution_sf(161.4476, 1, 1), 0.05, 1e-5);
  EXPECT_NEAR(f_distribution_sf(3.0, 2, 10), 0.095367431640625, 1e-12);
  EXPECT_EQ(f_distribution_sf(0, 1, 4), 1.0);
  EXPECT_EQ(f_distribution_sf(INFINITY, 1, 4), 0.0);
  EXPECT_THROW(f_distribution_sf(1, 0, 4), AnalysisError);
}

}  // namespace
}  // namespace mentum
