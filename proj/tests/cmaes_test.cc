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

#include "hopper/cmaes.h"

#include <atomic>
#include <cmath>
#include <thread>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "hopper/errors.h"

namespace hopper {
namespace {

double Sphere(const Eigen::VectorXd& x) { return x.squaredNorm(); }

double Rosenbrock(const Eigen::VectorXd& x) {
  return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
}

TEST(Cmaes, SphereTenDimensions) {
  CmaesSettings s;
  s.sigma0 = 0.5;
  s.max_evaluations = 2000;
  s.target_cost = 1e-10;
  const CmaesResult r = CmaesMinimize(Sphere, Eigen::VectorXd::Ones(10), s);
  EXPECT_LT(r.cost, 1e-10);
  EXPECT_LE(r.evaluations, 2000);
}

TEST(Cmaes, RosenbrockFindsMinimizer) {
  CmaesSettings s;
  s.sigma0 = 0.5;
  s.max_evaluations = 20000;
  s.seed = 3;
  const CmaesResult r = CmaesMinimize(Rosenbrock, Eigen::Vector2d(-1.2, 1.0), s);
  EXPECT_LT(r.cost, 1e-8);
  EXPECT_LT((r.x - Eigen::Vector2d(1, 1)).norm(), 1e-3);
}

TEST(Cmaes, HistoryIsMonotoneAndCovariancePositive) {
  CmaesSettings s;
  s.max_generations = 200;
  const CmaesResult r = CmaesMinimize(Rosenbrock, Eigen::Vector2d(-1.2, 1.0), s);
  ASSERT_FALSE(r.history.empty());
  for (size_t i = 1; i < r.history.size(); ++i) {
    EXPECT_LE(r.history[i].best_cost, r.history[i - 1].best_cost);
    EXPECT_GT(r.history[i].min_eigenvalue, 0.0);
  }
  EXPECT_EQ(r.history.back().best_cost, r.cost);
}

TEST(Cmaes, SeededRunsAreIdentical) {
  CmaesSettings s;
  s.seed = 42;
  s.max_generations = 60;
  const CmaesResult a = CmaesMinimize(Rosenbrock, Eigen::Vector2d(0, 0), s);
  const CmaesResult b = CmaesMinimize(Rosenbrock, Eigen::Vector2d(0, 0), s);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].best_cost, b.history[i].best_cost);
    EXPECT_EQ(a.history[i].sigma, b.history[i].sigma);
  }
  EXPECT_EQ(a.x, b.x);
}

TEST(Cmaes, ThreadCountDoesNotChangeResult) {
  CmaesSettings s;
  s.seed = 5;
  s.max_generations = 40;
  const CmaesResult one = CmaesMinimize(Sphere, Eigen::VectorXd::Ones(6), s);
  s.threads = 4;
  const CmaesResult four = CmaesMinimize(Sphere, Eigen::VectorXd::Ones(6), s);
  EXPECT_EQ(one.x, four.x);
  EXPECT_EQ(one.cost, four.cost);
}

TEST(Cmaes, StaysInsideBox) {
  CmaesSettings s;
  s.lower = Eigen::Vector2d(2.0, -1.0);
  s.upper = Eigen::Vector2d(3.0, 1.0);
  s.max_generations = 200;
  const CmaesResult r = CmaesMinimize(Sphere, Eigen::Vector2d(2.5, 0.5), s);
  EXPECT_NEAR(r.x[0], 2.0, 1e-6);
  EXPECT_NEAR(r.x[1], 0.0, 1e-6);
  EXPECT_GE(r.x[0], 2.0);
}

TEST(Cmaes, NonFiniteStartThrows) {
  const Objective bad = [](const Eigen::VectorXd&) { return std::nan(""); };
  EXPECT_THROW(CmaesMinimize(bad, Eigen::Vector2d(0, 0), {}), Error);
}

TEST(Cmaes, NonFiniteCandidatesRankLast) {
  const Objective f = [](const Eigen::VectorXd& x) {
    return x[0] < -0.5 ? INFINITY : x.squaredNorm();
  };
  CmaesSettings s;
  s.max_generations = 100;
  const CmaesResult r = CmaesMinimize(f, Eigen::Vector2d(1, 1), s);
  EXPECT_LT(r.cost, 1e-8);
}

TEST(Cmaes, ValidateSettings) {
  CmaesSettings s;
  s.sigma0 = 0.0;
  EXPECT_THROW(Validate(s, 2), ConfigError);
  s = CmaesSettings{};
  s.lower = Eigen::Vector2d(1, 1);
  EXPECT_THROW(Validate(s, 2), ConfigError);
  s.upper = Eigen::Vector2d(0, 2);
  EXPECT_THROW(Validate(s, 2), ConfigError);
}

TEST(ParallelEvaluate, KeepsCandidateOrder) {
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < 37; ++i) points.push_back(Eigen::VectorXd::Constant(1, i));
  std::atomic<int> calls{0};
  const Objective f = [&](const Eigen::VectorXd& x) {
    ++calls;
    return 2 * x[0];
  };
  const std::vector<double> out = ParallelEvaluate(f, points, 5);
  ASSERT_EQ(out.size(), 37u);
  for (int i = 0; i < 37; ++i) EXPECT_EQ(out[i], 2.0 * i);
  EXPECT_EQ(calls, 37);
}

}  // namespace
}  // namespace hopper
