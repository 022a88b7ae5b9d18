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

#ifndef HOPPER_CONTROL_H_
#define HOPPER_CONTROL_H_

#include <string_view>

#include <Eigen/Core>

#include "hopper/model.h"

namespace hopper {

// Energy-shaping hopping controller: a LiftOff -> Flight -> Touchdown state
// machine. Lift-off pushes with a Cartesian stiffness law whose feed-forward
// force is scaled by a gain adapted once per jump from the estimated apex.

enum class Phase { kLiftOff, kFlight, kTouchdown };

// Source of the previous-jump apex fed to the gain update.
enum class ApexFeedback {
  kBallistic,  // lift-off snapshot extrapolated with FlightHeight
  kMeasured,   // highest base height observed during the flight
};

std::string_view PhaseName(Phase phase);

struct EsGains {
  double kp_y = 10.0;
  double kd_y = 3.0;
  // Joint target during flight; see DefaultEsGains.
  Eigen::Vector2d flight_pose = Eigen::Vector2d::Zero();
  double flight_kp = 20.0;
  double flight_kd = 0.5;
  double touchdown_kp = 12.0;
  double touchdown_kd = 0.6;
  // Hip-to-foot distance of the extended standing pose, as a fraction of
  // l1 + l2. Sets the expected lift-off travel.
  double standing_extension = 0.95;
  double contact_threshold = 1.0;  // N
  double initial_gain = 1.0;
  // Lower bound on the lift-off travel used by the state machine.
  double min_stroke = 0.01;  // m
  ApexFeedback apex_feedback = ApexFeedback::kMeasured;
};

// Gains with the flight pose retracting the foot to 75% of the leg length,
// straight below the hip.
EsGains DefaultEsGains(const RobotModel& model);

struct ControllerState {
  Phase phase = Phase::kTouchdown;
  double k = 1.0;
  double x0_j = 0.0;
  double x_liftoff = 0.0;
  double xd_liftoff = 0.0;
  double t_liftoff = 0.0;
  double x_peak_prev = 0.0;
  bool has_peak = false;
  double x_desired = 0.3;
  // Highest base height reached during the current push or flight.
  double x_push_peak = 0.0;
  double x_flight_peak = 0.0;
  int liftoffs = 0;
};

// Starts in Touchdown so a robot at rest enters LiftOff on the first tick
// with x0_j set to its current height.
ControllerState InitialControllerState(double x_desired, const EsGains& gains,
                                       double x_now);

struct ControllerObservation {
  Configuration cfg;
  Eigen::Vector3d qd = Eigen::Vector3d::Zero();  // rail rate first
  bool contact = false;
  double t = 0.0;
};

double DesiredEnergy(double m, double g_mag, double x_d);

// Throws DegenerateStrokeError when dx_liftoff <= 0.
double FeedforwardForce(double m, double g_mag, double x_d, double x0_j,
                        double dx_liftoff);

// k * (E_d / E_prev)^2. Throws InvalidEnergyError when E_prev <= 0.
double UpdateGain(double k_prev, double desired_energy, double previous_energy);

// tau = J^T [k (F_ff, 0) + kp_y (0, -y) + kd_y (0, -ydot)], with the first
// component acting along -x (the foot pushes the ground down).
Eigen::Vector2d StiffnessTorques(const RobotModel& model,
                                 const Configuration& cfg,
                                 const Eigen::Vector2d& joint_rates, double k,
                                 double feedforward, const EsGains& gains);

// Ballistic base height after lift-off at (t_l, x_l, xd_l); g is signed.
double FlightHeight(double t, double t_l, double x_l, double xd_l, double g);

// Apex of the ballistic arc from the lift-off snapshot.
double BallisticApex(double x_l, double xd_l, double g);

Eigen::Vector2d PdTorques(const Eigen::Vector2d& q_target,
                          const Eigen::Vector2d& q, const Eigen::Vector2d& qd,
                          const Eigen::Vector2d& kp, const Eigen::Vector2d& kd);
Eigen::Vector2d PdTorques(const Eigen::Vector2d& q_target,
                          const Eigen::Vector2d& q, const Eigen::Vector2d& qd,
                          double kp, double kd);

// Base height of the extended standing pose.
double StandingHeight(const RobotModel& model, const EsGains& gains);

struct FsmOutput {
  Eigen::Vector2d tau = Eigen::Vector2d::Zero();
  ControllerState state;
};

FsmOutput FsmStep(const ControllerState& ctrl, const ControllerObservation& obs,
                  const RobotModel& model, const EsGains& gains);

}  // namespace hopper

#endif  // HOPPER_CONTROL_H_
