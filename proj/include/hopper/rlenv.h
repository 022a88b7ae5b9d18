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

#ifndef HOPPER_RLENV_H_
#define HOPPER_RLENV_H_

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hopper/model.h"
#include "hopper/sim.h"

namespace hopper {

// Reward terms. All penalties are non-negative; the total is
// w1 g_e - w2 p_h - w3 p_j - w4 p_jp - w5 p_jv.
struct RewardWeights {
  double energy = 0.5;
  double height = 2.0;
  double jerk = 0.05;
  double joint_position = 0.02;
  double joint_velocity = 0.005;
};

struct RewardBreakdown {
  double g_e = 0.0;
  double p_h = 0.0;
  double p_j = 0.0;
  double p_jp = 0.0;
  double p_jv = 0.0;
  double total = 0.0;
};

double RewardEnergy(double x, double x_rate, double x_o);
// e^(x - x_d) - 1 above the command, zero below.
double RewardHeightBarrier(double x, double x_d);
double RewardJerk(const Eigen::Vector2d& action,
                  const Eigen::Vector2d& previous);
double RewardJointPosition(const Eigen::Vector2d& q,
                           const Eigen::Vector2d& q_low,
                           const Eigen::Vector2d& q_high);
double RewardJointVelocity(const Eigen::Vector2d& qd,
                           const Eigen::Vector2d& qd_max);
RewardBreakdown TotalReward(double g_e, double p_h, double p_j, double p_jp,
                            double p_jv, const RewardWeights& weights = {});

inline constexpr int kStackDepth = 3;
inline constexpr int kFeaturesPerStep = 5;
inline constexpr int kObsDim = kStackDepth * kFeaturesPerStep;
inline constexpr int kActDim = 2;

// Layout, newest step first: for each stacked step
// [q_hip, q_knee, qd_hip, qd_knee, x_d], all normalized.
using Observation = std::array<double, kObsDim>;

std::vector<std::string> ObservationLayout();

struct JointSample {
  Eigen::Vector2d q = Eigen::Vector2d::Zero();
  Eigen::Vector2d qd = Eigen::Vector2d::Zero();
};

// Fixed-capacity history of raw joint samples. Age 0 is the newest. Ages past
// the stored count resolve to the oldest sample, which pads an underfull
// buffer.
class SampleHistory {
 public:
  explicit SampleHistory(int capacity = 10);

  void Push(const JointSample& sample);
  void Clear() { samples_.clear(); }
  const JointSample& AtAge(int age) const;
  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(samples_.size()); }

 private:
  int capacity_;
  std::vector<JointSample> samples_;  // oldest first
};

// Ages of the stacked steps, strictly increasing (newest first). With
// probability delay_prob three distinct ages are drawn uniformly from the
// buffer capacity, otherwise {0, 1, 2}.
std::array<int, kStackDepth> SampleStackAges(int capacity, double delay_prob,
                                             std::mt19937_64& rng);

// value + U(-lambda |value|, lambda |value|).
double ApplyNoise(double value, double lambda, std::mt19937_64& rng);

struct ObservationScales {
  Eigen::Vector2d q_low{-1.0, -1.0};
  Eigen::Vector2d q_high{1.0, 1.0};
  Eigen::Vector2d qd_max{1.0, 1.0};
  double height_scale = 0.35;

  static ObservationScales ForModel(const RobotModel& model,
                                    double height_scale);
};

// Stacks three samples chosen by SampleStackAges. Joint channels get
// multiplicative noise with `noise_joint` before normalization.
Observation BuildObservation(const SampleHistory& history, double x_desired,
                             const ObservationScales& scales,
                             double delay_prob, double noise_joint,
                             std::mt19937_64& rng);

struct EnvConfig {
  std::vector<double> commands = {0.25, 0.30, 0.35};  // m
  double episode_length = 10.0;                       // s
  double control_rate = 200.0;                        // Hz
  int physics_substeps = 5;
  double delay_prob = 0.5;
  int buffer_length = 10;
  double noise_joint = 0.05;
  double noise_torque = 0.15;
  double height_scale = 0.35;
  // Foot distance below the hip in the initial standing pose, as a fraction
  // of the leg length. x_o is the resulting carriage height.
  double standing_extension = 0.85;
  // Joint PD that takes over a joint while it is outside its limits.
  double safety_kp = 30.0;
  double safety_kd = 1.0;
  RewardWeights weights;
  std::uint64_t seed = 0;

  int EpisodeSteps() const;
};

// Throws ConfigError on out-of-range settings.
void Validate(const EnvConfig& config);

struct EnvInfo {
  double base_height = 0.0;
  double base_rate = 0.0;
  bool contact = false;
  double t = 0.0;
  int step = 0;
  Eigen::Vector2d torque = Eigen::Vector2d::Zero();  // applied, after noise
  std::string error;  // set when the step diverged
};

struct EnvStep {
  Observation observation{};
  RewardBreakdown reward;
  bool terminated = false;
  EnvInfo info;
};

// Single-owner hopping environment.
class HopperEnv {
 public:
  HopperEnv(const RobotModel& model, const SimParams& params,
            const EnvConfig& config);

  // Draws x_d from the command set unless `height` is given.
  Observation Reset(std::uint64_t seed,
                    std::optional<double> height = std::nullopt);
  // Throws ProtocolError before Reset, after termination, or on a malformed
  // action.
  EnvStep Step(const Eigen::Vector2d& action);

  // Evaluation only: changes x_d inside an episode.
  void SetCommand(double height);

  double command() const { return x_desired_; }
  double standing_height() const { return x_o_; }
  bool terminated() const { return terminated_; }
  const SimState& state() const { return state_; }
  const EnvConfig& config() const { return config_; }
  const RobotModel& model() const { return model_; }

 private:
  Observation Observe();

  RobotModel model_;
  SimParams params_;
  EnvConfig config_;
  ObservationScales scales_;
  std::mt19937_64 rng_;
  SampleHistory history_;
  SimState state_;
  Eigen::Vector2d previous_action_ = Eigen::Vector2d::Zero();
  double x_desired_ = 0.3;
  double x_o_ = 0.0;
  int steps_ = 0;
  bool ready_ = false;
  bool terminated_ = false;
};

}  // namespace hopper

#endif  // HOPPER_RLENV_H_
