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

#include "hopper/sim.h"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "hopper/control.h"
#include "hopper/errors.h"
#include "test_support.h"

namespace hopper {
namespace {

SimParams Defaults() { return ParamsWithModelInertia(SimParams{}, RobotModel{}); }

SimParams Frictionless(SimParams p) {
  p.rail_frictionloss = p.rail_damping = 0.0;
  p.hip_frictionloss = p.hip_damping = 0.0;
  p.knee_frictionloss = p.knee_damping = 0.0;
  return p;
}

// Body COM heights and lateral positions, written out independently.
std::array<Eigen::Vector2d, 3> Coms(const RobotModel& m, const Eigen::Vector3d& q) {
  const Eigen::Vector2d hip(q[0], 0.0);
  const Eigen::Vector2d d1(-std::cos(q[1]), -std::sin(q[1]));
  const Eigen::Vector2d d2(-std::cos(q[1] + q[2]), -std::sin(q[1] + q[2]));
  return {hip, hip + m.com1 * d1, hip + m.l1 * d1 + m.com2 * d2};
}

TEST(MassMatrix, MatchesKineticEnergyOracle) {
  const RobotModel m;
  const SimParams p = Defaults();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double mass[3] = {m.m_base, m.m1, m.m2};
  for (int n = 0; n < 50; ++n) {
    const Eigen::Vector3d q(u(rng), u(rng), u(rng));
    Eigen::Matrix3d oracle = Eigen::Matrix3d::Zero();
    const double h = 1e-6;
    std::array<std::array<Eigen::Vector2d, 3>, 3> d{};  // d[body][coord]
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d plus = q, minus = q;
      plus[j] += h;
      minus[j] -= h;
      const auto a = Coms(m, plus), b = Coms(m, minus);
      for (int body = 0; body < 3; ++body) d[body][j] = (a[body] - b[body]) / (2 * h);
    }
    for (int body = 0; body < 3; ++body) {
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) oracle(i, j) += mass[body] * d[body][i].dot(d[body][j]);
      }
    }
    // Rotation of link 1 is q1, of link 2 is q1 + q2.
    oracle(1, 1) += p.iz1 + p.iz2 + p.hip_armature;
    oracle(1, 2) += p.iz2;
    oracle(2, 1) += p.iz2;
    oracle(2, 2) += p.iz2 + p.knee_armature * m.belt_ratio * m.belt_ratio;
    const Eigen::Matrix3d got = MassMatrix(m, p, Configuration::FromVector(q));
    EXPECT_LT((got - oracle).cwiseAbs().maxCoeff(), 1e-8) << q.transpose();
  }
}

TEST(MassMatrix, SymmetricPositiveDefinite) {
  const RobotModel m;
  const SimParams p = Defaults();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int n = 0; n < 1000; ++n) {
    const Eigen::Matrix3d mass =
        MassMatrix(m, p, {u(rng), u(rng), u(rng)});
    EXPECT_EQ(mass, mass.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(mass);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(ContactForce, ZeroAboveGround) {
  const RobotModel m;
  SimState s;
  s.q = {0.5, 0.0, 0.0};  // foot at 0.1, ground at -0.2
  s.qd = {-3.0, 0.0, 0.0};
  EXPECT_EQ(ContactForce(s, m, Defaults()), 0.0);
}

TEST(ContactForce, StaticPenetrationFollowsSpringLaw) {
  const RobotModel m;
  const SimParams p = Defaults();
  SimState s;
  s.q = {m.ground_height + m.LegLength() - 0.001, 0.0, 0.0};
  const double k = 2.5 / (0.0911 * 0.0911 * 0.6678 * 0.6678);
  EXPECT_NEAR(ContactStiffness(m, p), k, 1e-9);
  EXPECT_NEAR(ContactForce(s, m, p), k * 0.001, 1e-9);
  EXPECT_NEAR(ContactForce(s, m, p), 0.6754, 5e-4);
}

TEST(ContactForce, SeparatingFootIsNeverAdhesive) {
  const RobotModel m;
  SimState s;
  s.q = {m.ground_height + m.LegLength() - 0.001, 0.0, 0.0};
  s.qd = {5.0, 0.0, 0.0};
  EXPECT_EQ(ContactForce(s, m, Defaults()), 0.0);
}

TEST(FrictionForces, AlwaysDissipative) {
  const SimParams p = Defaults();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int n = 0; n < 10000; ++n) {
    const Eigen::Vector3d qd(u(rng), u(rng) * 1e-3, u(rng));
    EXPECT_GE(qd.dot(FrictionForces(p, qd)), 0.0);
  }
}

TEST(Step, EnergyConservedWithoutFrictionOrContact) {
  const RobotModel m;
  const SimParams p = Frictionless(Defaults());
  SimState s;
  s.q = {0.5, 0.6, 1.2};
  s.qd = {0.0, 4.0, -6.0};
  StepOptions locked;
  locked.rail_locked = true;
  const double e0 = MechanicalEnergy(m, p, s);
  for (int i = 0; i < 1000; ++i) {
    s = Step(s, m, p, Eigen::Vector2d::Zero(), 1e-3, locked);
    ASSERT_FALSE(s.in_contact);
    EXPECT_LT(std::fabs(MechanicalEnergy(m, p, s) - e0), 0.01 * e0);
  }
}

TEST(Step, RigidLegFallsBallistically) {
  const RobotModel m;
  SimParams p = Defaults();
  p.rail_frictionloss = p.rail_damping = 0.0;
  SimState s;
  s.q = {0.8, 0.3, 0.9};
  const Eigen::Vector2d hold = s.q.tail<2>();
  const double dt = 1e-3;
  for (int n = 1; n <= 300; ++n) {
    const Eigen::Vector2d tau =
        PdTorques(hold, s.q.tail<2>(), s.qd.tail<2>(), 500.0, 5.0);
    s = Step(s, m, p, tau, dt);
    ASSERT_FALSE(s.in_contact);
    // Semi-implicit Euler: v_n = n g dt, x_n = x_0 + g dt^2 n (n + 1) / 2.
    ASSERT_NEAR(s.qd[0], n * m.gravity * dt, 1e-6);
    ASSERT_NEAR(s.q[0], 0.8 + m.gravity * dt * dt * n * (n + 1) / 2, 1e-6);
  }
  // The discrete solution lags the continuous one by g dt t / 2.
  EXPECT_NEAR(s.q[0], 0.8 + 0.5 * m.gravity * s.t * s.t,
              std::abs(m.gravity) * dt * s.t);
}

TEST(Step, CarriageRestsOnRailEndStop) {
  const RobotModel m;
  const SimParams p = Defaults();
  SimState s;
  // Leg folded sideways so the foot cannot reach the ground.
  s.q = {m.ground_height + 0.05, 1.5, 2.5};
  for (int i = 0; i < 3000; ++i) {
    const Eigen::Vector2d tau =
        PdTorques({1.5, 2.5}, s.q.tail<2>(), s.qd.tail<2>(), 20.0, 1.0);
    s = Step(s, m, p, tau, 1e-3);
  }
  EXPECT_EQ(s.f_normal, 0.0);
  EXPECT_TRUE(s.in_contact);
  // Static sag under the full weight: m g / k.
  const double sag = -m.m_total * m.gravity / ContactStiffness(m, p);
  EXPECT_NEAR(s.q[0], m.ground_height - sag, 1e-3);
  EXPECT_LT(std::abs(s.qd[0]), 1e-4);
}

TEST(Step, RestingRobotCarriesItsWeight) {
  const RobotModel m;
  const SimParams p = Defaults();
  const Eigen::Vector2d pose = CrouchPose(m, 0.3);
  SimState s = StandingState(m, p, pose);
  for (int i = 0; i < 4000; ++i) {
    s = Step(s, m, p, PdTorques(pose, s.q.tail<2>(), s.qd.tail<2>(), 30.0, 1.0),
             1e-3);
    ASSERT_GE(s.f_normal, 0.0);
  }
  const double weight = (m.m_base + m.m1 + m.m2) * m.GravityMagnitude();
  EXPECT_NEAR(s.f_normal, weight, 0.02 * weight);
}

TEST(Step, RailLockHoldsCarriage) {
  const RobotModel m;
  SimState s;
  s.q = {0.3, 0.2, 0.5};
  StepOptions locked;
  locked.rail_locked = true;
  for (int i = 0; i < 100; ++i) {
    s = Step(s, m, Defaults(), {1.0, -1.0}, 1e-3, locked);
  }
  EXPECT_EQ(s.q[0], 0.3);
  EXPECT_EQ(s.qd[0], 0.0);
}

TEST(Step, DivergenceNamesQuantity) {
  const RobotModel m;
  SimState s;
  s.q = {0.3, std::nan(""), 0.5};
  try {
    Step(s, m, Defaults(), Eigen::Vector2d::Zero(), 1e-3);
    FAIL() << "expected IntegrationDivergedError";
  } catch (const IntegrationDivergedError& e) {
    EXPECT_FALSE(e.quantity().empty());
  }
}

TEST(ClampTorque, RespectsJointLimits) {
  const RobotModel m;
  EXPECT_EQ(ClampTorque(m, {100.0, -100.0}), Eigen::Vector2d(12.0, -24.0));
  EXPECT_EQ(ClampTorque(m, {1.0, -2.0}), Eigen::Vector2d(1.0, -2.0));
}

TEST(RunEpisode, SampleCountAndPhysicsStep) {
  const RobotModel m;
  EpisodeSettings e;
  e.duration = 1.0;
  e.control_dt = 1.0 / 200.0;
  e.physics_substeps = 5;
  EXPECT_EQ(e.PhysicsDt(), 1e-3);
  const SimState start = StandingState(m, Defaults(), CrouchPose(m, 0.3));
  const TrajectoryLog log = RunEpisode(
      start, [](const SimState&) { return Eigen::Vector2d::Zero(); }, m,
      Defaults(), e);
  EXPECT_EQ(log.size(), 201u);
  EXPECT_EQ(log.front().t, 0.0);
}

TEST(RunEpisode, BitwiseDeterministic) {
  const RobotModel m;
  EpisodeSettings e;
  e.duration = 2.0;
  const SimState start = StandingState(m, Defaults(), CrouchPose(m, 0.3));
  const ControllerCallback wiggle = [](const SimState& s) {
    return Eigen::Vector2d(2 * std::sin(7 * s.t), -3 * std::cos(5 * s.t));
  };
  const TrajectoryLog a = RunEpisode(start, wiggle, m, Defaults(), e);
  const TrajectoryLog b = RunEpisode(start, wiggle, m, Defaults(), e);
  EXPECT_TRUE(testing::SameBits(a, b));
}

TEST(SimParams, ValidateRejectsNegativeFriction) {
  SimParams p = Defaults();
  p.hip_damping = -1.0;
  EXPECT_THROW(Validate(p), ConfigError);
  p = Defaults();
  p.contact_time_constant = 0.0;
  EXPECT_THROW(Validate(p), ConfigError);
}

}  // namespace
}  // namespace hopper
