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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hopper/errors.h"
#include "test_support.h"

namespace hopper {
namespace {

using testing::SameBits;

TEST(RewardEnergy, Examples) {
  EXPECT_EQ(RewardEnergy(0.2, 0.0, 0.2), 0.0);
  EXPECT_NEAR(RewardEnergy(0.3, 1.0, 0.2), 1.01, 1e-15);
}

TEST(RewardHeightBarrier, Examples) {
  EXPECT_EQ(RewardHeightBarrier(0.2, 0.3), 0.0);
  EXPECT_EQ(RewardHeightBarrier(0.3, 0.3), 0.0);
  EXPECT_NEAR(RewardHeightBarrier(0.4, 0.3), 0.10517091807564762, 1e-15);
}

TEST(RewardJerk, Examples) {
  EXPECT_EQ(RewardJerk({0.4, -0.1}, {0.4, -0.1}), 0.0);
  EXPECT_NEAR(RewardJerk({0.1, -0.2}, {0.0, 0.0}), 0.05, 1e-16);
}

TEST(RewardJointPosition, Examples) {
  const Eigen::Vector2d lo(-1, -1), hi(1, 1);
  EXPECT_NEAR(RewardJointPosition({0.0, 0.0}, lo, hi), 4 * std::exp(-10.0),
              1e-20);
  EXPECT_NEAR(RewardJointPosition({1.0, 0.0}, lo, hi),
              1 + std::exp(-20.0) + 2 * std::exp(-10.0), 1e-15);
  EXPECT_EQ(RewardJointPosition({1.5, -3.0}, lo, hi), 2.0);
}

TEST(RewardJointVelocity, Examples) {
  const Eigen::Vector2d qd_max(3.0, 5.0);
  EXPECT_EQ(RewardJointVelocity({3.0, -5.0}, qd_max), 0.0);
  EXPECT_EQ(RewardJointVelocity({6.0, 0.0}, qd_max), 27.0);
  EXPECT_EQ(RewardJointVelocity({0.0, -10.0}, qd_max), 75.0);
}

TEST(TotalReward, PublishedWeights) {
  EXPECT_EQ(TotalReward(0, 0, 0, 0, 0).total, 0.0);
  EXPECT_EQ(TotalReward(1, 0, 0, 0, 0).total, 0.5);
  EXPECT_EQ(TotalReward(0, 1, 0, 0, 0).total, -2.0);
  EXPECT_EQ(TotalReward(0, 0, 1, 0, 0).total, -0.05);
  EXPECT_EQ(TotalReward(0, 0, 0, 1, 0).total, -0.02);
  EXPECT_EQ(TotalReward(0, 0, 0, 0, 1).total, -0.005);
}

TEST(Rewards, PartsAreNonNegative) {
  const RobotModel m;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 10000; ++i) {
    EXPECT_GE(RewardEnergy(u(rng), u(rng), u(rng)), 0.0);
    EXPECT_GE(RewardHeightBarrier(u(rng), u(rng)), 0.0);
    EXPECT_GE(RewardJerk({u(rng), u(rng)}, {u(rng), u(rng)}), 0.0);
    EXPECT_GE(RewardJointPosition({u(rng), u(rng)}, m.q_low, m.q_high), 0.0);
    EXPECT_GE(RewardJointVelocity({10 * u(rng), 10 * u(rng)}, m.qd_max), 0.0);
  }
}

TEST(SampleStackAges, NoDelayGivesLatestThree) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(SampleStackAges(10, 0.0, rng), (std::array<int, 3>{0, 1, 2}));
  }
}

TEST(SampleStackAges, DelayedDrawsKeepTemporalOrder) {
  std::mt19937_64 rng(3);
  int delayed = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto a = SampleStackAges(10, 0.5, rng);
    ASSERT_TRUE(0 <= a[0] && a[0] < a[1] && a[1] < a[2] && a[2] < 10);
    delayed += a != std::array<int, 3>{0, 1, 2};
  }
  EXPECT_GT(delayed, 4500);
  EXPECT_LT(delayed, 5500);
}

TEST(ApplyNoise, Examples) {
  std::mt19937_64 rng(4);
  EXPECT_EQ(ApplyNoise(0.7, 0.0, rng), 0.7);
  EXPECT_EQ(ApplyNoise(0.0, 0.5, rng), 0.0);
  for (int i = 0; i < 1000; ++i) {
    const double v = ApplyNoise(-2.0, 0.1, rng);
    EXPECT_GE(v, -2.2);
    EXPECT_LE(v, -1.8);
  }
}

TEST(SampleHistory, PadsWithOldestSample) {
  SampleHistory h(4);
  h.Push({{1, 1}, {0, 0}});
  h.Push({{2, 2}, {0, 0}});
  EXPECT_EQ(h.AtAge(0).q[0], 2);
  EXPECT_EQ(h.AtAge(1).q[0], 1);
  EXPECT_EQ(h.AtAge(3).q[0], 1);
  for (int i = 3; i <= 6; ++i) h.Push({{double(i), 0}, {0, 0}});
  EXPECT_EQ(h.size(), 4);
  EXPECT_EQ(h.AtAge(3).q[0], 3);
}

TEST(BuildObservation, NormalizedWithinNoiseBand) {
  const RobotModel m;
  const ObservationScales scales = ObservationScales::ForModel(m, 0.35);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lambda = 0.05;
  for (int n = 0; n < 200; ++n) {
    SampleHistory h(10);
    for (int k = 0; k < 10; ++k) {
      JointSample s;
      for (int i = 0; i < 2; ++i) {
        s.q[i] = m.q_low[i] + u(rng) * (m.q_high[i] - m.q_low[i]);
        s.qd[i] = (2 * u(rng) - 1) * m.qd_max[i];
      }
      h.Push(s);
    }
    const Observation obs = BuildObservation(h, 0.3, scales, 0.5, lambda, rng);
    for (int i = 0; i < kObsDim; ++i) {
      if (i % kFeaturesPerStep == 4) {
        EXPECT_EQ(obs[i], 0.3 / 0.35);
        continue;
      }
      // Multiplicative noise on q can push a value near the lower limit by
      // lambda |q| / half-span in normalized units.
      const int joint = i % kFeaturesPerStep % 2;
      const double slack =
          (i % kFeaturesPerStep) < 2
              ? lambda * std::max(std::abs(m.q_low[joint]),
                                  std::abs(m.q_high[joint])) /
                    (0.5 * (m.q_high[joint] - m.q_low[joint]))
              : lambda;
      EXPECT_LE(std::abs(obs[i]), 1.0 + slack + 1e-12) << i;
    }
  }
}

TEST(BuildObservation, NoDelayNoNoiseIsLatestSamples) {
  const RobotModel m;
  const ObservationScales scales = ObservationScales::ForModel(m, 0.35);
  SampleHistory h(10);
  for (int k = 0; k < 5; ++k) h.Push({{0.1 * k, 0.2 * k}, {k * 1.0, -k * 1.0}});
  std::mt19937_64 rng(6);
  const Observation obs = BuildObservation(h, 0.25, scales, 0.0, 0.0, rng);
  for (int s = 0; s < 3; ++s) {
    const int k = 4 - s;
    EXPECT_DOUBLE_EQ(obs[s * 5 + 0],
                     2 * (0.1 * k - m.q_low[0]) / (m.q_high[0] - m.q_low[0]) - 1);
    EXPECT_DOUBLE_EQ(obs[s * 5 + 2], k / m.qd_max[0]);
  }
}

TEST(ObservationLayout, NoBaseHeightChannel) {
  const auto names = ObservationLayout();
  ASSERT_EQ(static_cast<int>(names.size()), kObsDim);
  for (const auto& n : names) {
    EXPECT_EQ(n.find("base"), std::string::npos);
    EXPECT_NE(n.rfind("x[", 0), 0u);
  }
  EXPECT_EQ(names[0], "q_hip[t-0]");
  EXPECT_EQ(names[14], "x_d[t-2]");
}

class EnvTest : public ::testing::Test {
 protected:
  RobotModel model;
  SimParams params = ParamsWithModelInertia(SimParams{}, model);
  EnvConfig config;
};

TEST_F(EnvTest, DeterministicUnderSeed) {
  HopperEnv a(model, params, config), b(model, params, config);
  const Observation oa = a.Reset(42), ob = b.Reset(42);
  EXPECT_TRUE(testing::SameBitsVec(oa, ob));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const Eigen::Vector2d action(u(rng), u(rng));
    const EnvStep sa = a.Step(action), sb = b.Step(action);
    for (int i = 0; i < kObsDim; ++i) {
      ASSERT_TRUE(SameBits(sa.observation[i], sb.observation[i]));
    }
    ASSERT_TRUE(SameBits(sa.reward.total, sb.reward.total));
  }
}

// Without torque the leg folds and the carriage settles on the rail end stop,
// so g_e is bounded by the drop to the floor. The other penalties stay zero.
TEST_F(EnvTest, ZeroActionSettlesWithoutJerkOrHeightPenalty) {
  HopperEnv env(model, params, config);
  const double x_o = StandingState(
      model, params,
      CrouchPose(model, config.standing_extension * model.LegLength()))
                         .q[0];
  const double drop = x_o - model.ground_height;
  env.Reset(1, 0.3);
  EnvStep s;
  for (int k = 0; k < 400; ++k) {
    s = env.Step(Eigen::Vector2d::Zero());
    EXPECT_EQ(s.reward.p_h, 0.0);
    EXPECT_EQ(s.reward.p_j, 0.0);
    EXPECT_EQ(s.reward.p_jv, 0.0);
    EXPECT_GE(s.reward.g_e, 0.0);
    EXPECT_GT(s.info.base_height, model.ground_height - 0.05);
    EXPECT_NEAR(s.reward.total,
                0.5 * s.reward.g_e - 0.02 * s.reward.p_jp, 1e-12);
  }
  EXPECT_LT(std::abs(s.info.base_rate), 1e-3);
  // The stop is as compliant as the foot contact, so allow some sag.
  EXPECT_LT(s.reward.g_e, (drop + 0.05) * (drop + 0.05));
}

TEST_F(EnvTest, TotalEqualsWeightedParts) {
  HopperEnv env(model, params, config);
  env.Reset(3);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const RewardWeights w;
  for (int k = 0; k < 500 && !env.terminated(); ++k) {
    const EnvStep s = env.Step({u(rng), u(rng)});
    const RewardBreakdown& r = s.reward;
    EXPECT_NEAR(r.total,
                w.energy * r.g_e - w.height * r.p_h - w.jerk * r.p_j -
                    w.joint_position * r.p_jp - w.joint_velocity * r.p_jv,
                1e-12);
  }
}

TEST_F(EnvTest, EpisodeEndsAfterConfiguredSteps) {
  config.episode_length = 0.1;
  HopperEnv env(model, params, config);
  env.Reset(0);
  int steps = 0;
  while (!env.terminated()) {
    env.Step(Eigen::Vector2d::Zero());
    ++steps;
  }
  EXPECT_EQ(steps, 20);
  EXPECT_THROW(env.Step(Eigen::Vector2d::Zero()), ProtocolError);
}

TEST_F(EnvTest, ProtocolOrderErrors) {
  HopperEnv env(model, params, config);
  EXPECT_THROW(env.Step(Eigen::Vector2d::Zero()), ProtocolError);
  env.Reset(0);
  EXPECT_THROW(env.Step({std::nan(""), 0.0}), ProtocolError);
  EXPECT_NO_THROW(env.Step({0.0, 0.0}));
}

TEST_F(EnvTest, ResetPicksFromCommandSet) {
  HopperEnv env(model, params, config);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    env.Reset(seed);
    const double c = env.command();
    EXPECT_TRUE(c == 0.25 || c == 0.30 || c == 0.35) << c;
  }
  env.Reset(0, 0.31);
  EXPECT_EQ(env.command(), 0.31);
}

TEST_F(EnvTest, ActionIsClippedAndScaled) {
  config.noise_torque = 0.0;
  HopperEnv env(model, params, config);
  env.Reset(0);
  const EnvStep s = env.Step({5.0, -0.5});
  EXPECT_EQ(s.info.torque, Eigen::Vector2d(12.0, -12.0));
}

TEST(EnvConfig, ValidateRejectsBadValues) {
  EnvConfig c;
  c.delay_prob = 1.5;
  EXPECT_THROW(Validate(c), ConfigError);
  c = EnvConfig{};
  c.buffer_length = 2;
  EXPECT_THROW(Validate(c), ConfigError);
  c = EnvConfig{};
  c.commands.clear();
  EXPECT_THROW(Validate(c), ConfigError);
}

}  // namespace
}  // namespace hopper
