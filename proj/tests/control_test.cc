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

#include "hopper/control.h"

#include <cmath>
#include <random>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "hopper/errors.h"
#include "hopper/trial.h"

namespace hopper {
namespace {

TEST(DesiredEnergy, Examples) {
  EXPECT_EQ(DesiredEnergy(2.5, 9.81, 0.0), 0.0);
  EXPECT_NEAR(DesiredEnergy(2.5, 9.81, 0.30), 7.3575, 1e-12);
}

TEST(FeedforwardForce, Examples) {
  EXPECT_EQ(FeedforwardForce(2.5, 9.81, 0.2, 0.2, 0.1), 0.0);
  EXPECT_NEAR(FeedforwardForce(2.5, 9.81, 0.3, 0.1, 0.1), 49.05, 1e-9);
}

TEST(FeedforwardForce, DegenerateStroke) {
  EXPECT_THROW(FeedforwardForce(2.5, 9.81, 0.3, 0.1, 0.0), DegenerateStrokeError);
  EXPECT_THROW(FeedforwardForce(2.5, 9.81, 0.3, 0.1, -0.1),
               DegenerateStrokeError);
}

TEST(UpdateGain, Examples) {
  EXPECT_EQ(UpdateGain(1.7, 5.0, 5.0), 1.7);
  EXPECT_EQ(UpdateGain(1.0, 2.0, 1.0), 4.0);
  EXPECT_THROW(UpdateGain(1.0, 2.0, 0.0), InvalidEnergyError);
  EXPECT_THROW(UpdateGain(1.0, 2.0, -1.0), InvalidEnergyError);
}

TEST(StiffnessTorques, ZeroForceOnAxis) {
  const RobotModel m;
  const EsGains g = DefaultEsGains(m);
  const Eigen::Vector2d q = CrouchPose(m, 0.3);
  const Configuration cfg{0.1, q[0], q[1]};
  const Eigen::Vector2d tau =
      StiffnessTorques(m, cfg, Eigen::Vector2d::Zero(), 1.0, 0.0, g);
  EXPECT_NEAR(tau.norm(), 0.0, 1e-12);
}

TEST(StiffnessTorques, PushesFootDown) {
  const RobotModel m;
  const EsGains g = DefaultEsGains(m);
  const Eigen::Vector2d q = CrouchPose(m, 0.3);
  const Configuration cfg{0.1, q[0], q[1]};
  const Eigen::Vector2d tau =
      StiffnessTorques(m, cfg, Eigen::Vector2d::Zero(), 2.0, 10.0, g);
  // tau = J^T f, so the foot force is recovered through J^-T.
  const Eigen::Matrix2d jac = EndEffectorJacobian(m, cfg);
  const Eigen::Vector2d force = jac.transpose().inverse() * tau;
  EXPECT_NEAR(force[0], -20.0, 1e-9);
  EXPECT_NEAR(force[1], 0.0, 1e-9);
}

TEST(FlightHeight, Examples) {
  EXPECT_EQ(FlightHeight(1.5, 1.5, 0.4, 2.0, -9.81), 0.4);
  EXPECT_NEAR(FlightHeight(0.2, 0.0, 0.4, 2.0, -9.81), 0.6038, 1e-12);
}

TEST(FlightHeight, EqualsFactoredForm) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double t_l = 10 * u(rng), dt = u(rng), x = u(rng), v = 3 * u(rng);
    const double g = -9.81 + u(rng);
    EXPECT_NEAR(FlightHeight(t_l + dt, t_l, x, v, g),
                x + v * dt + 0.5 * g * dt * dt, 1e-12);
  }
}

TEST(BallisticApex, PeakOfArc) {
  EXPECT_NEAR(BallisticApex(0.1, 2.0, -9.81), 0.1 + 4.0 / (2 * 9.81), 1e-15);
  EXPECT_EQ(BallisticApex(0.1, -1.0, -9.81), 0.1);
}

TEST(PdTorques, Examples) {
  const Eigen::Vector2d q(0.3, 1.0);
  EXPECT_EQ(PdTorques(q, q, Eigen::Vector2d::Zero(), 10.0, 1.0),
            Eigen::Vector2d::Zero());
  const Eigen::Vector2d tau =
      PdTorques({0.4, 1.0}, q, Eigen::Vector2d::Zero(), 10.0, 0.0);
  EXPECT_NEAR(tau[0], 1.0, 1e-12);
  EXPECT_EQ(tau[1], 0.0);
}

class FsmTest : public ::testing::Test {
 protected:
  RobotModel model;
  EsGains gains = DefaultEsGains(model);

  ControllerObservation Obs(double x, double x_rate, bool contact) {
    ControllerObservation o;
    o.cfg = {x, gains.flight_pose[0], gains.flight_pose[1]};
    o.qd = {x_rate, 0.0, 0.0};
    o.contact = contact;
    o.t = 1.0;
    return o;
  }
};

TEST_F(FsmTest, FlightWithoutContactStaysInFlight) {
  ControllerState c = InitialControllerState(0.3, gains, 0.0);
  c.phase = Phase::kFlight;
  EXPECT_EQ(FsmStep(c, Obs(0.2, 1.0, false), model, gains).state.phase,
            Phase::kFlight);
}

TEST_F(FsmTest, ContactEndsFlightImmediately) {
  ControllerState c = InitialControllerState(0.3, gains, 0.0);
  c.phase = Phase::kFlight;
  const FsmOutput out = FsmStep(c, Obs(0.0, -1.0, true), model, gains);
  EXPECT_EQ(out.state.phase, Phase::kTouchdown);
  EXPECT_EQ(out.state.x0_j, 0.0);
}

TEST_F(FsmTest, TouchdownWaitsForUpwardVelocity) {
  ControllerState c = InitialControllerState(0.3, gains, 0.0);
  c = FsmStep(c, Obs(-0.01, -0.1, true), model, gains).state;
  EXPECT_EQ(c.phase, Phase::kTouchdown);
  EXPECT_EQ(c.x0_j, -0.01);
  c = FsmStep(c, Obs(-0.012, 0.05, true), model, gains).state;
  EXPECT_EQ(c.phase, Phase::kLiftOff);
  EXPECT_EQ(c.x0_j, -0.012);
  EXPECT_EQ(c.liftoffs, 1);
}

TEST_F(FsmTest, LosingContactStartsFlight) {
  ControllerState c = InitialControllerState(0.3, gains, 0.0);
  c.phase = Phase::kLiftOff;
  const FsmOutput out = FsmStep(c, Obs(0.05, 1.5, false), model, gains);
  EXPECT_EQ(out.state.phase, Phase::kFlight);
  EXPECT_EQ(out.state.x_liftoff, 0.05);
  EXPECT_EQ(out.state.xd_liftoff, 1.5);
}

TEST_F(FsmTest, GainFixedPointWhenApexMatchesCommand) {
  ControllerState c = InitialControllerState(0.3, gains, 0.0);
  c.phase = Phase::kFlight;
  c.k = 1.37;
  c.x_flight_peak = 0.3;
  const FsmOutput out = FsmStep(c, Obs(0.0, -1.0, true), model, gains);
  EXPECT_EQ(out.state.k, 1.37);
}

TEST_F(FsmTest, LowApexRaisesGain) {
  ControllerState c = InitialControllerState(0.3, gains, 0.0);
  c.phase = Phase::kFlight;
  c.x_flight_peak = 0.15;
  const FsmOutput out = FsmStep(c, Obs(0.0, -1.0, true), model, gains);
  EXPECT_DOUBLE_EQ(out.state.k, 4.0);
}

TEST(FsmCycle, HoppingRunRepeatsTheThreePhases) {
  const RobotModel m;
  TrialSettings s;
  s.schedule = {{0.0, 0.30}};
  s.duration = 10.0;
  const TrialResult r =
      RunTrial(m, ParamsWithModelInertia(SimParams{}, m), DefaultEsGains(m), s);
  ASSERT_GT(r.report.timeline.size(), 20u);
  for (size_t i = 1; i < r.report.timeline.size(); ++i) {
    const Phase a = r.report.timeline[i - 1].phase;
    const Phase b = r.report.timeline[i].phase;
    const bool ok = (a == Phase::kLiftOff && b == Phase::kFlight) ||
                    (a == Phase::kFlight && b == Phase::kTouchdown) ||
                    (a == Phase::kTouchdown && b == Phase::kLiftOff);
    EXPECT_TRUE(ok) << PhaseName(a) << " -> " << PhaseName(b);
  }
}

}  // namespace
}  // namespace hopper
