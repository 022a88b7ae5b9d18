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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>

#include "hopper/errors.h"

namespace hopper {

void Validate(const CmaesSettings& settings, int dim) {
  if (dim < 1) throw ConfigError("cmaes.dim", "must be >= 1");
  if (settings.population != 0 && settings.population < 4) {
    throw ConfigError("cmaes.population", "must be >= 4");
  }
  if (!(settings.sigma0 > 0.0)) {
    throw ConfigError("cmaes.sigma0", "must be > 0");
  }
  if (settings.max_generations < 1) {
    throw ConfigError("cmaes.max_generations", "must be >= 1");
  }
  if (settings.threads < 1) throw ConfigError("cmaes.threads", "must be >= 1");
  const bool has_lower = settings.lower.size() > 0;
  const bool has_upper = settings.upper.size() > 0;
  if (has_lower != has_upper) {
    throw ConfigError("cmaes.bounds", "lower and upper must be given together");
  }
  if (has_lower) {
    if (settings.lower.size() != dim || settings.upper.size() != dim) {
      throw ConfigError("cmaes.bounds", "size must match the dimension");
    }
    if ((settings.lower.array() > settings.upper.array()).any()) {
      throw ConfigError("cmaes.bounds", "lower must not exceed upper");
    }
  }
}

std::vector<double> ParallelEvaluate(const Objective& objective,
                                     const std::vector<Eigen::VectorXd>& points,
                                     int threads) {
  std::vector<double> costs(points.size());
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(points.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      costs[i] = objective(points[i]);
    }
    return costs;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(points.size());
  auto work = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        costs[i] = objective(points[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return costs;
}

CmaesResult CmaesMinimize(const Objective& objective, const Eigen::VectorXd& x0,
                          const CmaesSettings& settings) {
  const int n = static_cast<int>(x0.size());
  Validate(settings, n);
  const bool bounded = settings.lower.size() > 0;
  auto project = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (!bounded) return x;
    return x.cwiseMax(settings.lower).cwiseMin(settings.upper);
  };

  const int lambda = settings.population > 0
                         ? settings.population
                         : 4 + static_cast<int>(std::floor(3.0 * std::log(n)));
  const int mu = lambda / 2;
  Eigen::VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) {
    weights[i] = std::log(mu + 0.5) - std::log(i + 1.0);
  }
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();

  const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) +
      c_sigma;
  const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
  const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
  const double c_mu =
      std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                              ((n + 2.0) * (n + 2.0) + mu_eff));
  const double chi_n =
      std::sqrt(static_cast<double>(n)) *
      (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  CmaesResult result;
  result.x = project(x0);
  result.cost = objective(result.x);
  result.evaluations = 1;
  if (!std::isfinite(result.cost)) {
    throw Error("objective is not finite at the initial point");
  }

  Eigen::VectorXd mean = x0;
  double sigma = settings.sigma0;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);  // sqrt eigenvalues
  Eigen::VectorXd p_sigma = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd p_c = Eigen::VectorXd::Zero(n);

  std::mt19937_64 rng(settings.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Eigen::VectorXd> steps(lambda, Eigen::VectorXd(n));
  std::vector<Eigen::VectorXd> candidates(lambda, Eigen::VectorXd(n));
  std::vector<Eigen::VectorXd> feasible(lambda, Eigen::VectorXd(n));

  for (int gen = 1; gen <= settings.max_generations; ++gen) {
    for (int k = 0; k < lambda; ++k) {
      Eigen::VectorXd z(n);
      for (int i = 0; i < n; ++i) z[i] = normal(rng);
      steps[k] = basis * scale.cwiseProduct(z);
      candidates[k] = mean + sigma * steps[k];
      feasible[k] = project(candidates[k]);
    }
    const std::vector<double> raw =
        ParallelEvaluate(objective, feasible, settings.threads);
    result.evaluations += lambda;

    std::vector<double> fitness(lambda);
    for (int k = 0; k < lambda; ++k) {
      const double f =
          std::isfinite(raw[k]) ? raw[k] : std::numeric_limits<double>::max();
      fitness[k] =
          f + settings.penalty_weight *
                  (candidates[k] - feasible[k]).squaredNorm();
      if (std::isfinite(raw[k]) && raw[k] < result.cost) {
        result.cost = raw[k];
        result.x = feasible[k];
      }
    }
    std::vector<int> order(lambda);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fitness[a] < fitness[b]; });

    Eigen::VectorXd y_w = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) y_w += weights[i] * steps[order[i]];
    mean += sigma * y_w;

    // C^{-1/2} y_w = B D^{-1} B^T y_w.
    const Eigen::VectorXd whitened =
        basis * (basis.transpose() * y_w).cwiseQuotient(scale);
    p_sigma = (1.0 - c_sigma) * p_sigma +
              std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) * whitened;
    const double ps_norm = p_sigma.norm();
    const bool h_sigma =
        ps_norm / std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * gen)) <
        (1.4 + 2.0 / (n + 1.0)) * chi_n;
    p_c = (1.0 - c_c) * p_c +
          (h_sigma ? std::sqrt(c_c * (2.0 - c_c) * mu_eff) : 0.0) * y_w;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) {
      const Eigen::VectorXd& y = steps[order[i]];
      rank_mu += weights[i] * y * y.transpose();
    }
    const double lost = h_sigma ? 0.0 : c_c * (2.0 - c_c);
    cov = (1.0 - c_1 - c_mu + c_1 * lost) * cov +
          c_1 * p_c * p_c.transpose() + c_mu * rank_mu;
    cov = 0.5 * (cov + cov.transpose());

    sigma *= std::exp((c_sigma / d_sigma) * (ps_norm / chi_n - 1.0));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    Eigen::VectorXd eigenvalues = eig.eigenvalues();
    const double min_eig = eigenvalues.minCoeff();
    eigenvalues = eigenvalues.cwiseMax(1e-300);
    basis = eig.eigenvectors();
    scale = eigenvalues.cwiseSqrt();

    CmaesGeneration record;
    record.generation = gen;
    record.evaluations = result.evaluations;
    record.best_cost = result.cost;
    record.generation_best = fitness[order[0]];
    record.sigma = sigma;
    record.min_eigenvalue = min_eig;
    result.history.push_back(record);

    if (result.cost <= settings.target_cost) {
      result.stop_reason = "target_cost";
      return result;
    }
    if (settings.max_evaluations > 0 &&
        result.evaluations >= settings.max_evaluations) {
      result.stop_reason = "max_evaluations";
      return result;
    }
    if (sigma * scale.maxCoeff() < settings.tol_x) {
      result.stop_reason = "tol_x";
      return result;
    }
    if (scale.maxCoeff() > 1e7 * scale.minCoeff()) {
      result.stop_reason = "condition";
      return result;
    }
  }
  result.stop_reason = "max_generations";
  return result;
}

}  // namespace hopper
