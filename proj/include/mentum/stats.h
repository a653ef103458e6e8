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

#ifndef MENTUM_STATS_H_
#define MENTUM_STATS_H_

#include <cstddef>
#include <span>
#include <vector>

namespace mentum {

double mean(std::span<const double> values);
// n-1 denominator; requires at least two values.
double sample_sd(std::span<const double> values);
// Standard error of the mean; 0 for a single value.
double sem(std::span<const double> values);

// I_x(a, b) by Lentz's continued fraction. a, b > 0, 0 <= x <= 1.
double regularized_incomplete_beta(double a, double b, double x);

// Upper tail P(F >= f) of the F(d1, d2) distribution.
double f_distribution_sf(double f, double d1, double d2);

// Standard normal upper tail P(Z >= z).
double normal_sf(double z);

// Midranks (1-based) of the pooled values; ties get the mean of their ranks.
std::vector<double> midranks(std::span<const double> values);

struct RankTestResult {
  double p_value = 1.0;
  double statistic = 0.0;  // rank sum of x, or W+ for the signed-rank test
  bool exact = true;
  bool ties = false;
  std::size_t n = 0;  // pooled size, or number of non-zero differences
};

// Pooled sizes up to this use exact enumeration.
inline constexpr std::size_t kExactRankLimit = 20;

// Two-sided Wilcoxon rank-sum test. Exact when the pooled sample has no ties
// and at most kExactRankLimit values; otherwise normal approximation with tie
// correction and continuity correction (exact = false).
RankTestResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y);

enum class ZeroDifferences {
  kDrop,   // Wilcoxon: discard zero differences before ranking
  kPratt,  // rank with zeros included, then discard their ranks
};

// Two-sided Wilcoxon signed-rank test on paired samples. Exact sign-pattern
// enumeration for up to kExactRankLimit non-zero differences (midranks are
// allowed). Throws AnalysisError on unequal lengths or when every difference
// is zero.
RankTestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y,
                                    ZeroDifferences zeros = ZeroDifferences::kDrop);

}  // namespace mentum

#endif  // MENTUM_STATS_H_
