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

#include "hopper/rlenv.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hopper/errors.h"

namespace hopper {

double RewardEnergy(double x, double x_rate, double x_o) {
  const double dx = x - x_o;
  return x_rate * x_rate + dx * dx;
}

double RewardHeightBarrier(double x, double x_d) {
  return x >= x_d ? std::expm1(x - x_d) : 0.0;
}

double RewardJerk(const Eigen::Vector2d& action,
                  const Eigen::Vector2d& previous) {
  return (action - previous).squaredNorm();
}

double RewardJointPosition(const Eigen::Vector2d& q,
                           const Eigen::Vector2d& q_low,
                           const Eigen::Vector2d& q_high) {
  double sum = 0.0;
  for (int i = 0; i < 2; ++i) {
    if (q[i] >= q_low[i] && q[i] <= q_high[i]) {
      sum += std::exp(-10.0 * (q[i] - q_low[i])) +
             std::exp(10.0 * (q[i] - q_high[i]));
    } else {
      sum += 1.0;
    }
  }
  return sum;
}

double RewardJointVelocity(const Eigen::Vector2d& qd,
                           const Eigen::Vector2d& qd_max) {
  double sum = 0.0;
  for (int i = 0; i < 2; ++i) {
    if (std::abs(qd[i]) > qd_max[i]) {
      sum += qd[i] * qd[i] - qd_max[i] * qd_max[i];
    }
  }
  return sum;
}

RewardBreakdown TotalReward(double g_e, double p_h, double p_j, double p_jp,
                            double p_jv, const RewardWeights& weights) {
  RewardBreakdown r{g_e, p_h, p_j, p_jp, p_jv, 0.0};
  r.total = weights.energy * g_e - weights.height * p_h -
            weights.jerk * p_j - weights.joint_position * p_jp -
            weights.joint_velocity * p_jv;
  return r;
}

std::vector<std::string> ObservationLayout() {
  static const char* kFeatures[kFeaturesPerStep] = {"q_hip", "q_knee",
                                                    "qd_hip", "qd_knee", "x_d"};
  std::vector<std::string> names;
  for (int s = 0; s < kStackDepth; ++s) {
    for (const char* f : kFeatures) {
      names.push_back(std::string(f) + "[t-" + std::to_string(s) + "]");
    }
  }
  return names;
}

SampleHistory::SampleHistory(int capacity) : capacity_(capacity) {
  if (capacity < kStackDepth) {
    throw ConfigError("env.buffer_length",
                      "must be at least " + std::to_string(kStackDepth));
  }
  samples_.reserve(capacity);
}

void SampleHistory::Push(const JointSample& sample) {
  if (size() == capacity_) samples_.erase(samples_.begin());
  samples_.push_back(sample);
}

const JointSample& SampleHistory::AtAge(int age) const {
  if (samples_.empty()) throw Error("sample history is empty");
  const int clamped = std::min(age, size() - 1);
  return samples_[samples_.size() - 1 - clamped];
}

std::array<int, kStackDepth> SampleStackAges(int capacity, double delay_prob,
                                             std::mt19937_64& rng) {
  std::array<int, kStackDepth> ages{0, 1, 2};
  std::bernoulli_distribution delayed(delay_prob);
  if (!delayed(rng)) return ages;
  std::vector<int> pool(capacity);
  std::iota(pool.begin(), pool.end(), 0);
  // std::sample keeps the input order, so the ages come out sorted.
  std::sample(pool.begin(), pool.end(), ages.begin(), kStackDepth, rng);
  return ages;
}

double ApplyNoise(double value, double lambda, std::mt19937_64& rng) {
  const double half_width = lambda * std::abs(value);
  if (half_width == 0.0) return value;
  std::uniform_real_distribution<double> u(-half_width, half_width);
  return value + u(rng);
}

ObservationScales ObservationScales::ForModel(const RobotModel& model,
                                              double height_scale) {
  return {model.q_low, model.q_high, model.qd_max, height_scale};
}

Observation BuildObservation(const SampleHistory& history, double x_desired,
                             const ObservationScales& scales,
                             double delay_prob, double noise_joint,
                             std::mt19937_64& rng) {
  const auto ages = SampleStackAges(history.capacity(), delay_prob, rng);
  Observation obs{};
  const Eigen::Vector2d span = scales.q_high - scales.q_low;
  for (int s = 0; s < kStackDepth; ++s) {
    const JointSample& sample = history.AtAge(ages[s]);
    double* out = obs.data() + s * kFeaturesPerStep;
    for (int i = 0; i < 2; ++i) {
      const double q = ApplyNoise(sample.q[i], noise_joint, rng);
      out[i] = 2.0 * (q - scales.q_low[i]) / span[i] - 1.0;
    }
    for (int i = 0; i < 2; ++i) {
      const double qd = ApplyNoise(sample.qd[i], noise_joint, rng);
      out[2 + i] = qd / scales.qd_max[i];
    }
    out[4] = x_desired / scales.height_scale;
  }
  return obs;
}

int EnvConfig::EpisodeSteps() const {
  return static_cast<int>(std::llround(episode_length * control_rate));
}

void Validate(const EnvConfig& config) {
  if (config.commands.empty()) {
    throw ConfigError("env.commands", "must not be empty");
  }
  if (!(config.episode_length > 0.0)) {
    throw ConfigError("env.episode_length", "must be > 0");
  }
  if (!(config.control_rate > 0.0)) {
    throw ConfigError("env.control_rate", "must be > 0");
  }
  if (config.physics_substeps < 1) {
    throw ConfigError("env.physics_substeps", "must be >= 1");
  }
  if (!(config.delay_prob >= 0.0 && config.delay_prob <= 1.0)) {
    throw ConfigError("env.delay_prob", "must be in [0, 1]");
  }
  if (config.buffer_length < kStackDepth) {
    throw ConfigError("env.buffer_length",
                      "must be at least " + std::to_string(kStackDepth));
  }
  if (!(config.noise_joint >= 0.0)) {
    throw ConfigError("env.noise_joint", "must be >= 0");
  }
  if (!(config.noise_torque >= 0.0)) {
    throw ConfigError("env.noise_torque", "must be >= 0");
  }
  if (!(config.height_scale > 0.0)) {
    throw ConfigError("env.height_scale", "must be > 0");
  }
  if (!(config.standing_extension > 0.0 && config.standing_extension < 1.0)) {
    throw ConfigError("env.standing_extension", "must be in (0, 1)");
  }
}

HopperEnv::HopperEnv(const RobotModel& model, const SimParams& params,
                     const EnvConfig& config)
    : model_(model),
      params_(params),
      config_(config),
      scales_(ObservationScales::ForModel(model, config.height_scale)),
      rng_(config.seed),
      history_(config.buffer_length) {
  Validate(model_);
  Validate(params_);
  Validate(config_);
}

Observation HopperEnv::Reset(std::uint64_t seed, std::optional<double> height) {
  rng_.seed(seed);
  if (height) {
    x_desired_ = *height;
  } else {
    std::uniform_int_distribution<std::size_t> pick(
        0, config_.commands.size() - 1);
    x_desired_ = config_.commands[pick(rng_)];
  }
  const Eigen::Vector2d pose =
      CrouchPose(model_, config_.standing_extension * model_.LegLength());
  state_ = StandingState(model_, params_, pose);
  x_o_ = state_.q[0];
  history_.Clear();
  history_.Push({state_.q.tail<2>(), state_.qd.tail<2>()});
  previous_action_.setZero();
  steps_ = 0;
  ready_ = true;
  terminated_ = false;
  return Observe();
}

void HopperEnv::SetCommand(double height) { x_desired_ = height; }

Observation HopperEnv::Observe() {
  return BuildObservation(history_, x_desired_, scales_, config_.delay_prob,
                          config_.noise_joint, rng_);
}

EnvStep HopperEnv::Step(const Eigen::Vector2d& action) {
  if (!ready_) throw ProtocolError("step before reset");
  if (terminated_) throw ProtocolError("step after termination; reset first");
  if (!action.allFinite()) throw ProtocolError("action must be finite");

  const Eigen::Vector2d a = action.cwiseMax(-1.0).cwiseMin(1.0);
  const Eigen::Vector2d limit = model_.JointTorqueLimit();
  Eigen::Vector2d tau = a.cwiseProduct(limit);
  for (int i = 0; i < 2; ++i) {
    tau[i] = ApplyNoise(tau[i], config_.noise_torque, rng_);
  }
  const Eigen::Vector2d q = state_.q.tail<2>();
  const Eigen::Vector2d qd = state_.qd.tail<2>();
  for (int i = 0; i < 2; ++i) {
    const double bounded = std::clamp(q[i], model_.q_low[i], model_.q_high[i]);
    if (bounded != q[i]) {
      tau[i] = config_.safety_kp * (bounded - q[i]) - config_.safety_kd * qd[i];
    }
  }
  tau = ClampTorque(model_, tau);

  EnvStep out;
  const double dt = 1.0 / config_.control_rate / config_.physics_substeps;
  try {
    for (int s = 0; s < config_.physics_substeps; ++s) {
      state_ = hopper::Step(state_, model_, params_, tau, dt);
    }
  } catch (const IntegrationDivergedError& e) {
    out.info.error = e.what();
    terminated_ = true;
  }
  ++steps_;
  if (steps_ >= config_.EpisodeSteps()) terminated_ = true;

  history_.Push({state_.q.tail<2>(), state_.qd.tail<2>()});
  out.observation = Observe();

  const double x = state_.q[0];
  out.reward = TotalReward(
      RewardEnergy(x, state_.qd[0], x_o_), RewardHeightBarrier(x, x_desired_),
      RewardJerk(a, previous_action_),
      RewardJointPosition(state_.q.tail<2>(), model_.q_low, model_.q_high),
      RewardJointVelocity(state_.qd.tail<2>(), model_.qd_max),
      config_.weights);
  previous_action_ = a;

  out.terminated = terminated_;
  out.info.base_height = x;
  out.info.base_rate = state_.qd[0];
  out.info.contact = state_.in_contact;
  out.info.t = state_.t;
  out.info.step = steps_;
  out.info.torque = tau;
  return out;
}

}  // namespace hopper
