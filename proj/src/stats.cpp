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

#include "mentum/stats.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mentum/error.h"

namespace mentum {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 10000;

// Continued fraction for I_x(a, b), modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw AnalysisError("incomplete beta continued fraction did not converge");
}

// Tail probabilities of an integer-valued statistic from its count table.
double two_sided_from_counts(const std::vector<double>& counts, double total, std::size_t observed) {
  double lower = 0.0;
  double upper = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    if (s <= observed) lower += counts[s];
    if (s >= observed) upper += counts[s];
  }
  return std::min(1.0, 2.0 * std::min(lower, upper) / total);
}

double tie_term(std::span<const double> sorted_values) {
  double sum = 0.0;
  for (std::size_t i = 0; i < sorted_values.size();) {
    std::size_t j = i;
    while (j < sorted_values.size() && sorted_values[j] == sorted_values[i]) ++j;
    const double t = static_cast<double>(j - i);
    sum += t * t * t - t;
    i = j;
  }
  return sum;
}

double normal_two_sided(double deviation, double sigma) {
  if (sigma <= 0.0) return 1.0;
  const double z = (std::abs(deviation) - 0.5) / sigma;
  if (z <= 0.0) return 1.0;
  return std::min(1.0, 2.0 * normal_sf(z));
}

}  // namespace

double mean(std::span<const double> values) {
  if (values.empty()) throw AnalysisError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) throw AnalysisError("standard deviation needs at least two values");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double sem(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  return sample_sd(values) / std::sqrt(static_cast<double>(values.size()));
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw AnalysisError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw AnalysisError("incomplete beta needs 0 <= x <= 1");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_distribution_sf(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw AnalysisError("F distribution needs positive degrees of freedom");
  if (std::isnan(f)) throw AnalysisError("F statistic is NaN");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

RankTestResult wilcoxon_rank_sum(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw AnalysisError("rank-sum test needs two non-empty samples");
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::vector<double> ranks = midranks(pooled);

  RankTestResult result;
  result.n = pooled.size();
  for (std::size_t i = 0; i < x.size(); ++i) result.statistic += ranks[i];

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  const double ties = tie_term(sorted);
  result.ties = ties > 0.0;

  const std::size_t n1 = x.size();
  const std::size_t big_n = pooled.size();
  if (!result.ties && big_n <= kExactRankLimit) {
    // ways[k][s]: subsets of {1..i} with k elements summing to s.
    const std::size_t max_sum = big_n * (big_n + 1) / 2;
    std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t r = 1; r <= big_n; ++r) {
      for (std::size_t k = std::min(r, n1); k >= 1; --k) {
        for (std::size_t s = max_sum; s >= r; --s) ways[k][s] += ways[k - 1][s - r];
      }
    }
    double total = 0.0;
    for (double c : ways[n1]) total += c;
    result.p_value =
        two_sided_from_counts(ways[n1], total, static_cast<std::size_t>(std::llround(result.statistic)));
    result.exact = true;
    return result;
  }

  const double n1d = static_cast<double>(n1);
  const double n2d = static_cast<double>(y.size());
  const double nd = static_cast<double>(big_n);
  const double mu = n1d * (nd + 1.0) / 2.0;
  const double var = n1d * n2d / 12.0 * ((nd + 1.0) - ties / (nd * (nd - 1.0)));
  result.p_value = normal_two_sided(result.statistic - mu, std::sqrt(std::max(var, 0.0)));
  result.exact = false;
  return result;
}

RankTestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y, ZeroDifferences zeros) {
  if (x.size() != y.size()) throw AnalysisError("signed-rank test needs paired samples of equal length");
  if (x.empty()) throw AnalysisError("signed-rank test needs at least one pair");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0 || zeros == ZeroDifferences::kPratt) diffs.push_back(d);
  }
  const bool any_nonzero = std::any_of(diffs.begin(), diffs.end(), [](double d) { return d != 0.0; });
  if (!any_nonzero) throw AnalysisError("signed-rank test: every difference is zero");

  std::vector<double> magnitudes(diffs.size());
  std::transform(diffs.begin(), diffs.end(), magnitudes.begin(), [](double d) { return std::abs(d); });
  const std::vector<double> ranks = midranks(magnitudes);

  // Only non-zero differences carry a sign.
  std::vector<double> signed_ranks;
  RankTestResult result;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] == 0.0) continue;
    signed_ranks.push_back(ranks[i]);
    if (diffs[i] > 0.0) result.statistic += ranks[i];
  }
  result.n = signed_ranks.size();
  std::vector<double> sorted = magnitudes;
  std::sort(sorted.begin(), sorted.end());
  const double ties = tie_term(sorted);
  result.ties = ties > 0.0;

  if (signed_ranks.size() <= kExactRankLimit) {
    // Midranks are multiples of 1/2, so doubled ranks are integers.
    std::size_t max_sum = 0;
    std::vector<std::size_t> doubled;
    for (double r : signed_ranks) {
      doubled.push_back(static_cast<std::size_t>(std::llround(2.0 * r)));
      max_sum += doubled.back();
    }
    std::vector<double> counts(max_sum + 1, 0.0);
    counts[0] = 1.0;
    for (std::size_t r : doubled) {
      for (std::size_t s = max_sum; s >= r; --s) {
        counts[s] += counts[s - r];
        if (s == r) break;
      }
    }
    const double total = std::ldexp(1.0, static_cast<int>(doubled.size()));
    result.p_value =
        two_sided_from_counts(counts, total, static_cast<std::size_t>(std::llround(2.0 * result.statistic)));
    result.exact = true;
    return result;
  }

  double mu = 0.0;
  double var = 0.0;
  for (double r : signed_ranks) {
    mu += r / 2.0;
    var += r * r / 4.0;
  }
  result.p_value = normal_two_sided(result.statistic - mu, std::sqrt(var));
  result.exact = false;
  return result;
}

}  // namespace mentum
