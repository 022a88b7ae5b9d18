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

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "hopper/errors.h"

namespace hopper {
namespace {

using Jacobian23 = Eigen::Matrix<double, 2, 3>;

// Carriage, upper link and lower link: COM position, translational Jacobian,
// J_dot * qd, rotational Jacobian row.
struct Bodies {
  std::array<double, 3> mass;
  std::array<double, 3> inertia;
  std::array<Eigen::Vector2d, 3> com;
  std::array<Jacobian23, 3> jv;
  std::array<Eigen::Vector2d, 3> jv_dot_qd;
  std::array<Eigen::RowVector3d, 3> jw;
};

Bodies ComputeBodies(const RobotModel& model, const SimParams& params,
                     const Eigen::Vector3d& q, const Eigen::Vector3d& qd) {
  const double x = q[0], q1 = q[1], phi2 = q[1] + q[2];
  const double w1 = qd[1], w2 = qd[1] + qd[2];
  const double s1 = std::sin(q1), c1 = std::cos(q1);
  const double s12 = std::sin(phi2), c12 = std::cos(phi2);
  const double a = model.com1, b = model.com2, l1 = model.l1;

  Bodies bodies;
  bodies.mass = {model.m_base, model.m1, model.m2};
  bodies.inertia = {0.0, params.iz1, params.iz2};

  bodies.com[0] = {x, 0.0};
  bodies.jv[0] << 1, 0, 0, 0, 0, 0;
  bodies.jv_dot_qd[0].setZero();
  bodies.jw[0] << 0, 0, 0;

  bodies.com[1] = {x - a * c1, -a * s1};
  bodies.jv[1] << 1, a * s1, 0, 0, -a * c1, 0;
  bodies.jv_dot_qd[1] = {a * c1 * w1 * w1, a * s1 * w1 * w1};
  bodies.jw[1] << 0, 1, 0;

  bodies.com[2] = {x - l1 * c1 - b * c12, -l1 * s1 - b * s12};
  bodies.jv[2] << 1, l1 * s1 + b * s12, b * s12, 0, -l1 * c1 - b * c12,
      -b * c12;
  bodies.jv_dot_qd[2] = {l1 * c1 * w1 * w1 + b * c12 * w2 * w2,
                         l1 * s1 * w1 * w1 + b * s12 * w2 * w2};
  bodies.jw[2] << 0, 1, 1;
  return bodies;
}

// Foot Jacobian with respect to all three generalized coordinates.
Jacobian23 FootJacobian(const RobotModel& model, const Eigen::Vector3d& q) {
  Jacobian23 jac;
  jac.col(0) = Eigen::Vector2d(1.0, 0.0);
  jac.rightCols<2>() = EndEffectorJacobian(model, Configuration::FromVector(q));
  return jac;
}

struct ContactWrench {
  double normal = 0.0;
  double tangential = 0.0;
};

ContactWrench ComputeContact(const RobotModel& model, const SimParams& params,
                             const Eigen::Vector3d& q,
                             const Eigen::Vector3d& qd) {
  ContactWrench wrench;
  const Eigen::Vector2d foot =
      ForwardKinematics(model, Configuration::FromVector(q));
  const double depth = model.ground_height - foot[0];
  if (depth <= 0.0) return wrench;
  const Eigen::Vector2d foot_vel = FootJacobian(model, q) * qd;
  const double depth_rate = -foot_vel[0];
  wrench.normal = std::max(0.0, ContactStiffness(model, params) * depth +
                                    ContactDamping(model, params) * depth_rate);
  wrench.tangential = -params.tangential_damping * wrench.normal * foot_vel[1];
  return wrench;
}

void CheckFinite(const SimState& state) {
  static constexpr std::array<const char*, 3> kQ = {"q[0]", "q[1]", "q[2]"};
  static constexpr std::array<const char*, 3> kQd = {"qd[0]", "qd[1]",
                                                     "qd[2]"};
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(state.q[i])) {
      throw IntegrationDivergedError(kQ[i], state.t);
    }
  }
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(state.qd[i])) {
      throw IntegrationDivergedError(kQd[i], state.t);
    }
  }
  if (!std::isfinite(state.f_normal)) {
    throw IntegrationDivergedError("f_normal", state.t);
  }
}

}  // namespace

void Validate(const SimParams& params) {
  auto nonneg = [](double v, const char* key) {
    if (!(v >= 0.0)) throw ConfigError(key, "must be >= 0");
  };
  nonneg(params.rail_frictionloss, "sim.rail_frictionloss");
  nonneg(params.rail_damping, "sim.rail_damping");
  nonneg(params.hip_frictionloss, "sim.hip_frictionloss");
  nonneg(params.knee_frictionloss, "sim.knee_frictionloss");
  nonneg(params.hip_damping, "sim.hip_damping");
  nonneg(params.knee_damping, "sim.knee_damping");
  nonneg(params.hip_armature, "sim.hip_armature");
  nonneg(params.knee_armature, "sim.knee_armature");
  nonneg(params.tangential_damping, "sim.tangential_damping");
  if (!(params.iz1 > 0)) throw ConfigError("sim.iz1", "must be > 0");
  if (!(params.iz2 > 0)) throw ConfigError("sim.iz2", "must be > 0");
  if (!(params.contact_time_constant > 0)) {
    throw ConfigError("sim.contact_time_constant", "must be > 0");
  }
  if (!(params.contact_damping_ratio > 0)) {
    throw ConfigError("sim.contact_damping_ratio", "must be > 0");
  }
  if (!(params.friction_velocity_eps > 0)) {
    throw ConfigError("sim.friction_velocity_eps", "must be > 0");
  }
}

SimParams ParamsWithModelInertia(SimParams params, const RobotModel& model) {
  params.iz1 = model.iz1;
  params.iz2 = model.iz2;
  return params;
}

double ContactStiffness(const RobotModel& model, const SimParams& params) {
  const double tc = params.contact_time_constant;
  const double zeta = params.contact_damping_ratio;
  return model.m_total / (tc * tc * zeta * zeta);
}

double ContactDamping(const RobotModel& model, const SimParams& params) {
  return 2.0 * model.m_total / params.contact_time_constant;
}

Eigen::Matrix3d MassMatrix(const RobotModel& model, const SimParams& params,
                           const Configuration& cfg) {
  const Bodies bodies =
      ComputeBodies(model, params, cfg.AsVector(), Eigen::Vector3d::Zero());
  Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) {
    mass += bodies.mass[i] * bodies.jv[i].transpose() * bodies.jv[i];
    mass += bodies.inertia[i] * bodies.jw[i].transpose() * bodies.jw[i];
  }
  mass(1, 1) += params.hip_armature;
  mass(2, 2) += params.knee_armature * model.belt_ratio * model.belt_ratio;
  return 0.5 * (mass + mass.transpose());
}

Eigen::Vector3d BiasForces(const RobotModel& model, const SimParams& params,
                           const SimState& state) {
  const Bodies bodies = ComputeBodies(model, params, state.q, state.qd);
  const Eigen::Vector2d g(model.gravity, 0.0);
  Eigen::Vector3d bias = Eigen::Vector3d::Zero();
  for (int i = 0; i < 3; ++i) {
    bias += bodies.mass[i] * bodies.jv[i].transpose() *
            (bodies.jv_dot_qd[i] - g);
  }
  return bias;
}

Eigen::Vector3d FrictionForces(const SimParams& params,
                               const Eigen::Vector3d& qd) {
  const Eigen::Vector3d damping(params.rail_damping, params.hip_damping,
                                params.knee_damping);
  const Eigen::Vector3d loss(params.rail_frictionloss, params.hip_frictionloss,
                             params.knee_frictionloss);
  Eigen::Vector3d force;
  for (int i = 0; i < 3; ++i) {
    force[i] = damping[i] * qd[i] +
               loss[i] * std::tanh(qd[i] / params.friction_velocity_eps);
  }
  return force;
}

double ContactForce(const SimState& state, const RobotModel& model,
                    const SimParams& params) {
  return ComputeContact(model, params, state.q, state.qd).normal;
}

double MechanicalEnergy(const RobotModel& model, const SimParams& params,
                        const SimState& state) {
  const Eigen::Matrix3d mass = MassMatrix(model, params, state.Config());
  const double kinetic = 0.5 * state.qd.dot(mass * state.qd);
  const Bodies bodies = ComputeBodies(model, params, state.q, state.qd);
  double potential = 0.0;
  for (int i = 0; i < 3; ++i) {
    potential -= bodies.mass[i] * model.gravity *
                 (bodies.com[i][0] - model.ground_height);
  }
  return kinetic + potential;
}

Eigen::Vector2d ClampTorque(const RobotModel& model,
                            const Eigen::Vector2d& tau) {
  const Eigen::Vector2d limit = model.JointTorqueLimit();
  return tau.cwiseMax(-limit).cwiseMin(limit);
}

SimState Step(const SimState& state, const RobotModel& model,
              const SimParams& params, const Eigen::Vector2d& tau, double dt,
              const StepOptions& options) {
  const Eigen::Vector2d tau_applied = ClampTorque(model, tau);

  const Eigen::Vector3d& q = state.q;
  const Eigen::Vector3d& qd = state.qd;
  const Eigen::Matrix3d mass = MassMatrix(model, params, state.Config());
  const Eigen::Vector3d bias = BiasForces(model, params, state);
  const Eigen::Vector3d friction = FrictionForces(params, qd);

  Eigen::Vector3d force = -bias - friction;
  force.tail<2>() += tau_applied;

  // d(dissipative force)/d(qd), used for the linearly-implicit update.
  Eigen::Matrix3d damping = Eigen::Matrix3d::Zero();
  const Eigen::Vector3d viscous(params.rail_damping, params.hip_damping,
                                params.knee_damping);
  const Eigen::Vector3d loss(params.rail_frictionloss, params.hip_frictionloss,
                             params.knee_frictionloss);
  for (int i = 0; i < 3; ++i) {
    const double th = std::tanh(qd[i] / params.friction_velocity_eps);
    damping(i, i) =
        viscous[i] + loss[i] * (1.0 - th * th) / params.friction_velocity_eps;
  }

  const ContactWrench contact = ComputeContact(model, params, q, qd);
  if (contact.normal > 0.0) {
    const Jacobian23 foot_jac = FootJacobian(model, q);
    force += foot_jac.transpose() *
             Eigen::Vector2d(contact.normal, contact.tangential);
    const Eigen::RowVector3d jx = foot_jac.row(0);
    const Eigen::RowVector3d jy = foot_jac.row(1);
    damping += ContactDamping(model, params) * jx.transpose() * jx;
    damping += params.tangential_damping * contact.normal * jy.transpose() * jy;
  }

  // Lower end stop of the rail: the carriage cannot sink below the floor.
  const double below = model.ground_height - q[0];
  if (below > 0.0 && !options.rail_locked) {
    const double k = ContactStiffness(model, params);
    const double b = ContactDamping(model, params);
    force[0] += std::max(0.0, k * below - b * qd[0]);
    damping(0, 0) += b;
  }

  SimState next = state;
  const Eigen::Matrix3d lhs = mass + dt * damping;
  if (options.rail_locked) {
    const Eigen::Vector2d delta =
        lhs.bottomRightCorner<2, 2>().ldlt().solve(dt * force.tail<2>());
    next.qd[0] = 0.0;
    next.qd.tail<2>() = qd.tail<2>() + delta;
  } else {
    next.qd = qd + lhs.ldlt().solve(dt * force);
  }
  next.q = q + dt * next.qd;
  next.t = state.t + dt;
  next.f_normal = ContactForce(next, model, params);
  next.in_contact = next.f_normal > 0.0 || next.q[0] < model.ground_height;
  CheckFinite(next);
  return next;
}

SimState StandingState(const RobotModel& model, const SimParams& params,
                       const Eigen::Vector2d& joints) {
  SimState state;
  Configuration cfg{0.0, joints[0], joints[1]};
  const Eigen::Vector2d foot = ForwardKinematics(model, cfg);
  state.q = {model.ground_height - foot[0], joints[0], joints[1]};
  state.f_normal = ContactForce(state, model, params);
  state.in_contact = state.f_normal > 0.0;
  return state;
}

int EpisodeSettings::ControlSteps() const {
  return static_cast<int>(std::llround(duration / control_dt));
}

LogSample MakeLogSample(const SimState& state, const RobotModel& model,
                        const Eigen::Vector2d& tau) {
  LogSample sample;
  sample.t = state.t;
  sample.q = state.q;
  sample.qd = state.qd;
  sample.tau = tau;
  sample.foot = ForwardKinematics(model, state.Config());
  sample.contact = state.in_contact;
  sample.f_n = state.f_normal;
  return sample;
}

void RunEpisodeInto(const SimState& initial, const ControllerCallback& controller,
                    const RobotModel& model, const SimParams& params,
                    const EpisodeSettings& settings, TrajectoryLog& log) {
  if (!(settings.control_dt > 0) || settings.physics_substeps < 1) {
    throw Error("episode needs control_dt > 0 and physics_substeps >= 1");
  }
  const int steps = settings.ControlSteps();
  const double dt = settings.PhysicsDt();
  log.clear();
  log.reserve(steps + 1);
  SimState state = initial;
  for (int k = 0;; ++k) {
    const Eigen::Vector2d tau = ClampTorque(model, controller(state));
    log.push_back(MakeLogSample(state, model, tau));
    if (k == steps) break;
    for (int s = 0; s < settings.physics_substeps; ++s) {
      state = Step(state, model, params, tau, dt, settings.step);
    }
    // Re-anchor the clock at control ticks so long runs do not accumulate
    // round-off in t.
    state.t = initial.t + (k + 1) * settings.control_dt;
  }
}

TrajectoryLog RunEpisode(const SimState& initial,
                         const ControllerCallback& controller,
                         const RobotModel& model, const SimParams& params,
                         const EpisodeSettings& settings) {
  TrajectoryLog log;
  RunEpisodeInto(initial, controller, model, params, settings, log);
  return log;
}

}  // namespace hopper
