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

#ifndef HOPPER_SIM_H_
#define HOPPER_SIM_H_

#include <functional>

#include <Eigen/Core>

#include "hopper/model.h"
#include "hopper/trajectory_log.h"

namespace hopper {

// Identifiable simulation parameters. Defaults are the fitted values the
// reference hardware setup reported.
struct SimParams {
  double rail_frictionloss = 0.7024;  // N
  double rail_damping = 1.0724;       // N s/m
  double hip_frictionloss = 0.4364;   // N m
  double knee_frictionloss = 0.0015;
  double hip_damping = 0.0005;  // N m s/rad
  double knee_damping = 0.1441;
  double hip_armature = 0.00004;  // kg m^2
  double knee_armature = 0.0001;
  double iz1 = 0.004061;
  double iz2 = 0.000845;
  double contact_time_constant = 0.0911;  // s
  double contact_damping_ratio = 0.6678;

  // Not identified.
  double friction_velocity_eps = 1e-3;  // tanh smoothing of friction loss
  double tangential_damping = 1.0;      // lateral foot force per unit f_n, s/m
};

// Throws ConfigError on negative friction/damping/armature or non-positive
// contact constants.
void Validate(const SimParams& params);

// Copies the inertias from the robot description.
SimParams ParamsWithModelInertia(SimParams params, const RobotModel& model);

struct SimState {
  Eigen::Vector3d q = Eigen::Vector3d::Zero();   // x, q_hip, q_knee
  Eigen::Vector3d qd = Eigen::Vector3d::Zero();  // rail and joint rates
  double t = 0.0;
  bool in_contact = false;  // foot on the ground or carriage on the end stop
  double f_normal = 0.0;     // foot normal force

  Configuration Config() const { return Configuration::FromVector(q); }
};

struct StepOptions {
  // Fixed-base setup: the carriage is clamped to the rail.
  bool rail_locked = false;
};

// Contact spring and damper constants derived from time constant and
// damping ratio: k = m / (tc^2 zeta^2), b = 2 m / tc.
double ContactStiffness(const RobotModel& model, const SimParams& params);
double ContactDamping(const RobotModel& model, const SimParams& params);

Eigen::Matrix3d MassMatrix(const RobotModel& model, const SimParams& params,
                           const Configuration& cfg);

// Coriolis, centrifugal and gravity terms h(q, qd).
Eigen::Vector3d BiasForces(const RobotModel& model, const SimParams& params,
                           const SimState& state);

// Joint friction (viscous plus tanh-smoothed Coulomb loss). Always
// dissipative: qd . f >= 0.
Eigen::Vector3d FrictionForces(const SimParams& params,
                               const Eigen::Vector3d& qd);

// Normal ground force on the foot; zero when the foot is above the ground and
// never adhesive.
double ContactForce(const SimState& state, const RobotModel& model,
                    const SimParams& params);

// Kinetic plus potential energy (potential measured from the ground plane).
double MechanicalEnergy(const RobotModel& model, const SimParams& params,
                        const SimState& state);

Eigen::Vector2d ClampTorque(const RobotModel& model, const Eigen::Vector2d& tau);

// One semi-implicit Euler step. Torques are clamped to the joint limits;
// velocity-dependent dissipative forces are integrated linearly-implicitly.
// The carriage meets a compliant end stop at the ground height, with the same
// stiffness and damping as the foot contact.
// Throws IntegrationDivergedError naming the first non-finite quantity.
SimState Step(const SimState& state, const RobotModel& model,
              const SimParams& params, const Eigen::Vector2d& tau, double dt,
              const StepOptions& options = {});

// Builds a resting state at `joints` with the foot touching the ground.
SimState StandingState(const RobotModel& model, const SimParams& params,
                       const Eigen::Vector2d& joints);

using ControllerCallback = std::function<Eigen::Vector2d(const SimState&)>;

struct EpisodeSettings {
  double duration = 1.0;
  double control_dt = 1.0 / 200.0;
  int physics_substeps = 5;
  StepOptions step;

  double PhysicsDt() const { return control_dt / physics_substeps; }
  int ControlSteps() const;
};

// Zero-order hold of the controller output between control ticks. The log
// holds ControlSteps() + 1 samples; sample k carries the (clamped) torque
// commanded at tick k. On divergence `log` keeps every completed sample and the error
// propagates.
void RunEpisodeInto(const SimState& initial, const ControllerCallback& controller,
                    const RobotModel& model, const SimParams& params,
                    const EpisodeSettings& settings, TrajectoryLog& log);

TrajectoryLog RunEpisode(const SimState& initial,
                         const ControllerCallback& controller,
                         const RobotModel& model, const SimParams& params,
                         const EpisodeSettings& settings);

LogSample MakeLogSample(const SimState& state, const RobotModel& model,
                        const Eigen::Vector2d& tau);

}  // namespace hopper

#endif  // HOPPER_SIM_H_
