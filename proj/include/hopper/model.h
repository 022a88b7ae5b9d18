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

#ifndef HOPPER_MODEL_H_
#define HOPPER_MODEL_H_

#include <Eigen/Core>

namespace hopper {

// Geometric, inertial and limit description of the rail-mounted leg.
//
// Frame convention: world x is vertical along the rail (up), y is horizontal.
// The hip sits on the carriage at (x, 0). Joint angles are measured from the
// straight-down pose; link i points along (-cos(phi_i), -sin(phi_i)) where
// phi_1 = q_hip and phi_2 = q_hip + q_knee.
struct RobotModel {
  double l1 = 0.2;  // upper link (shank), m
  double l2 = 0.2;  // lower link (calf), m

  double m_base = 1.5;  // carriage, kg
  double m1 = 0.625;
  double m2 = 0.375;
  double com1 = 0.1;  // COM offset along each link from its proximal joint
  double com2 = 0.1;
  double iz1 = 0.004061;  // about the link COM, kg m^2
  double iz2 = 0.000845;

  // Point mass used by the energy-shaping controller.
  double m_total = 2.5;

  Eigen::Vector2d q_low{-2.0, -0.05};
  Eigen::Vector2d q_high{2.0, 2.9};
  Eigen::Vector2d qd_max{25.0, 25.0};
  double tau_max = 12.0;

  // Knee is belt driven, joint:motor = 1:belt_ratio.
  double belt_ratio = 2.0;
  double gravity = -9.81;
  // World height of the ground plane (rail datum is x = 0).
  double ground_height = -0.2;

  double LegLength() const { return l1 + l2; }
  double GravityMagnitude() const { return gravity < 0 ? -gravity : gravity; }
  // Torque limit at joint level for each actuated joint.
  Eigen::Vector2d JointTorqueLimit() const {
    return {tau_max, tau_max * belt_ratio};
  }
};

// Throws ConfigError naming the first violated invariant.
void Validate(const RobotModel& model);

struct Configuration {
  double x = 0.0;
  double q_hip = 0.0;
  double q_knee = 0.0;

  Eigen::Vector3d AsVector() const { return {x, q_hip, q_knee}; }
  Eigen::Vector2d Joints() const { return {q_hip, q_knee}; }
  static Configuration FromVector(const Eigen::Vector3d& q) {
    return {q[0], q[1], q[2]};
  }
};

// Foot position in the world frame.
Eigen::Vector2d ForwardKinematics(const RobotModel& model,
                                  const Configuration& cfg);

// Knee-backward branch (q_knee >= 0). Throws OutOfWorkspaceError when the
// target radius from the hip is outside [|l1 - l2|, l1 + l2].
Configuration InverseKinematics(const RobotModel& model, double carriage_height,
                                const Eigen::Vector2d& target);

// d(foot)/d(q_hip, q_knee). Same in the world and the carriage frame since
// the carriage only translates.
Eigen::Matrix2d EndEffectorJacobian(const RobotModel& model,
                                    const Configuration& cfg);

// Joint angles placing the foot straight below the hip at `radius`.
Eigen::Vector2d CrouchPose(const RobotModel& model, double radius);

}  // namespace hopper

#endif  // HOPPER_MODEL_H_
