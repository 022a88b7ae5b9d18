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

#include "hopper/model.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hopper/errors.h"

namespace hopper {

void Validate(const RobotModel& model) {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key, what);
  };
  require(model.l1 > 0, "model.l1", "must be > 0");
  require(model.l2 > 0, "model.l2", "must be > 0");
  require(model.m_base > 0, "model.m_base", "must be > 0");
  require(model.m1 > 0, "model.m1", "must be > 0");
  require(model.m2 > 0, "model.m2", "must be > 0");
  require(model.m_total > 0, "model.m_total", "must be > 0");
  require(model.iz1 > 0, "model.iz1", "must be > 0");
  require(model.iz2 > 0, "model.iz2", "must be > 0");
  require(model.q_low[0] < model.q_high[0], "model.q_hip_low",
          "must be below model.q_hip_high");
  require(model.q_low[1] < model.q_high[1], "model.q_knee_low",
          "must be below model.q_knee_high");
  require(model.qd_max.minCoeff() > 0, "model.qd_max", "must be > 0");
  require(model.tau_max > 0, "model.tau_max", "must be > 0");
  require(model.belt_ratio > 0, "model.belt_ratio", "must be > 0");
}

Eigen::Vector2d ForwardKinematics(const RobotModel& model,
                                  const Configuration& cfg) {
  const double phi2 = cfg.q_hip + cfg.q_knee;
  return {cfg.x - model.l1 * std::cos(cfg.q_hip) - model.l2 * std::cos(phi2),
          -model.l1 * std::sin(cfg.q_hip) - model.l2 * std::sin(phi2)};
}

Configuration InverseKinematics(const RobotModel& model, double carriage_height,
                                const Eigen::Vector2d& target) {
  // hip-relative foot position
  const double dx = target[0] - carriage_height;
  const double dy = target[1];
  const double r = std::hypot(dx, dy);
  const double l1 = model.l1, l2 = model.l2;
  const double slack = 1e-12 * (l1 + l2);
  if (r > l1 + l2 + slack || r < std::abs(l1 - l2) - slack) {
    std::ostringstream msg;
    msg << "target out of workspace: radius " << r << " m not in ["
        << std::abs(l1 - l2) << ", " << l1 + l2 << "]";
    throw OutOfWorkspaceError(msg.str(), r);
  }
  const double c2 =
      std::clamp((r * r - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
  const double q_knee = std::acos(c2);
  // Direction of the foot measured like the link angles (from straight down).
  const double psi = std::atan2(-dy, -dx);
  const double q_hip =
      psi - std::atan2(l2 * std::sin(q_knee), l1 + l2 * std::cos(q_knee));
  return {carriage_height, q_hip, q_knee};
}

Eigen::Matrix2d EndEffectorJacobian(const RobotModel& model,
                                    const Configuration& cfg) {
  const double s1 = std::sin(cfg.q_hip), c1 = std::cos(cfg.q_hip);
  const double s12 = std::sin(cfg.q_hip + cfg.q_knee);
  const double c12 = std::cos(cfg.q_hip + cfg.q_knee);
  Eigen::Matrix2d jac;
  jac << model.l1 * s1 + model.l2 * s12, model.l2 * s12,
      -model.l1 * c1 - model.l2 * c12, -model.l2 * c12;
  return jac;
}

Eigen::Vector2d CrouchPose(const RobotModel& model, double radius) {
  const Configuration cfg =
      InverseKinematics(model, 0.0, Eigen::Vector2d(-radius, 0.0));
  return cfg.Joints();
}

}  // namespace hopper
