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

#ifndef HOPPER_STATS_H_
#define HOPPER_STATS_H_

#include <span>
#include <vector>

namespace hopper {

// Linear-interpolation quantile (type 7), p in [0, 1].
double Quantile(std::vector<double> values, double p);
double Median(std::span<const double> values);

struct RankSumResult {
  double u = 0.0;  // Mann-Whitney U of the first sample
  double z = 0.0;
  double p_value = 1.0;  // two-sided
};

// Wilcoxon rank-sum test with average ranks for ties and the tie-corrected
// normal approximation. Exact enumeration is used when both samples have at
// most 10 elements.
RankSumResult RankSumTest(std::span<const double> a,
                          std::span<const double> b);

}  // namespace hopper

#endif  // HOPPER_STATS_H_
