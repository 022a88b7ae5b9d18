// Copyright 2026 The Hopper Authors
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

#include "hopper/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hopper/errors.h"

namespace hopper {
namespace {

// Number of orderings of m and n items giving U = u, for u = 0..m*n.
std::vector<double> ExactUDistribution(int m, int n) {
  // counts[i][j] holds the distribution for (i, j) samples.
  std::vector<std::vector<std::vector<double>>> counts(
      m + 1, std::vector<std::vector<double>>(n + 1));
  for (int i = 0; i <= m; ++i) {
    for (int j = 0; j <= n; ++j) {
      std::vector<double>& dist = counts[i][j];
      dist.assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        dist[0] = 1.0;
        continue;
      }
      // Largest element from the first sample contributes j to U.
      const std::vector<double>& a = counts[i - 1][j];
      const std::vector<double>& b = counts[i][j - 1];
      for (size_t u = 0; u < a.size(); ++u) dist[u + j] += a[u];
      for (size_t u = 0; u < b.size(); ++u) dist[u] += b[u];
    }
  }
  return counts[m][n];
}

}  // namespace

double Quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double Median(std::span<const double> values) {
  return Quantile(std::vector<double>(values.begin(), values.end()), 0.5);
}

RankSumResult RankSumTest(std::span<const double> a,
                          std::span<const double> b) {
  const size_t m = a.size(), n = b.size();
  if (m == 0 || n == 0) throw Error("rank-sum test needs two non-empty samples");
  struct Item {
    double value;
    bool first;
  };
  std::vector<Item> items;
  items.reserve(m + n);
  for (double v : a) items.push_back({v, true});
  for (double v : b) items.push_back({v, false});
  std::sort(items.begin(), items.end(),
            [](const Item& l, const Item& r) { return l.value < r.value; });

  double rank_sum = 0.0;
  double tie_term = 0.0;
  bool has_ties = false;
  for (size_t i = 0; i < items.size();) {
    size_t j = i;
    while (j + 1 < items.size() && items[j + 1].value == items[i].value) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1) has_ties = true;
    tie_term += t * t * t - t;
    for (size_t k = i; k <= j; ++k) {
      if (items[k].first) rank_sum += avg_rank;
    }
    i = j + 1;
  }

  const double dm = static_cast<double>(m), dn = static_cast<double>(n);
  RankSumResult result;
  result.u = rank_sum - dm * (dm + 1.0) / 2.0;
  const double mean = dm * dn / 2.0;
  const double total = dm + dn;
  const double var =
      dm * dn / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
  result.z = var > 0 ? (result.u - mean) / std::sqrt(var) : 0.0;

  if (!has_ties && m <= 10 && n <= 10) {
    const std::vector<double> dist =
        ExactUDistribution(static_cast<int>(m), static_cast<int>(n));
    const double combos = std::accumulate(dist.begin(), dist.end(), 0.0);
    const double u_low = std::min(result.u, dm * dn - result.u);
    double tail = 0.0;
    for (int u = 0; u <= static_cast<int>(std::lround(u_low)); ++u) {
      tail += dist[u];
    }
    result.p_value = std::min(1.0, 2.0 * tail / combos);
  } else {
    result.p_value = std::erfc(std::abs(result.z) / std::sqrt(2.0));
  }
  return result;
}

}  // namespace hopper
