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

#ifndef HOPPER_CMAES_H_
#define HOPPER_CMAES_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hopper {

// (mu/mu_w, lambda)-CMA-ES with cumulative step-size adaptation and
// rank-one plus rank-mu covariance updates. Learning rates follow the usual
// defaults for the problem dimension.

struct CmaesSettings {
  int population = 0;  // 0 selects 4 + floor(3 ln n)
  double sigma0 = 0.3;
  int max_generations = 1000;
  int max_evaluations = 0;  // 0 means unlimited
  // Stops once the best cost is at or below this value.
  double target_cost = -1e300;
  // Stops when sigma * sqrt(max eigenvalue of C) falls below this.
  double tol_x = 1e-14;
  std::uint64_t seed = 1;
  // Worker threads for evaluating one generation; results are reduced in
  // candidate order, so the run does not depend on this value.
  int threads = 1;
  // Optional box. Candidates outside are evaluated at their projection and
  // charged penalty_weight * squared distance to the box.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double penalty_weight = 1e4;
};

// Throws ConfigError on bad settings.
void Validate(const CmaesSettings& settings, int dim);

struct CmaesGeneration {
  int generation = 0;
  int evaluations = 0;
  double best_cost = 0.0;        // best so far, nonincreasing
  double generation_best = 0.0;  // best penalized cost of this generation
  double sigma = 0.0;
  double min_eigenvalue = 0.0;  // of C, after the update
};

struct CmaesResult {
  Eigen::VectorXd x;  // always inside the box
  double cost = 0.0;
  int evaluations = 0;
  std::vector<CmaesGeneration> history;
  std::string stop_reason;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

// Throws Error when the objective is not finite at x0. Non-finite costs later
// in the run rank last.
CmaesResult CmaesMinimize(const Objective& objective, const Eigen::VectorXd& x0,
                          const CmaesSettings& settings);

// Evaluates objective(points[i]) for all i on `threads` workers; element i of
// the result always belongs to points[i].
std::vector<double> ParallelEvaluate(const Objective& objective,
                                     const std::vector<Eigen::VectorXd>& points,
                                     int threads);

}  // namespace hopper

#endif  // HOPPER_CMAES_H_
