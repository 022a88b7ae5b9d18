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

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "hopper/errors.h"

namespace hopper {

std::string_view PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kLiftOff:
      return "liftoff";
    case Phase::kFlight:
      return "flight";
    case Phase::kTouchdown:
      return "touchdown";
  }
  return "unknown";
}

EsGains DefaultEsGains(const RobotModel& model) {
  EsGains gains;
  gains.flight_pose = CrouchPose(model, 0.75 * model.LegLength());
  return gains;
}

ControllerState InitialControllerState(double x_desired, const EsGains& gains,
                                       double x_now) {
  ControllerState state;
  state.phase = Phase::kTouchdown;
  state.k = gains.initial_gain;
  state.x0_j = x_now;
  state.x_desired = x_desired;
  return state;
}

double DesiredEnergy(double m, double g_mag, double x_d) {
  return m * g_mag * x_d;
}

double FeedforwardForce(double m, double g_mag, double x_d, double x0_j,
                        double dx_liftoff) {
  if (!(dx_liftoff > 0.0)) {
    throw DegenerateStrokeError("expected lift-off travel must be > 0, got " +
                                std::to_string(dx_liftoff));
  }
  return m * g_mag * (x_d - x0_j) / dx_liftoff;
}

double UpdateGain(double k_prev, double desired_energy,
                  double previous_energy) {
  if (!(previous_energy > 0.0)) {
    throw InvalidEnergyError("previous jump energy must be > 0, got " +
                             std::to_string(previous_energy));
  }
  const double ratio = desired_energy / previous_energy;
  return k_prev * ratio * ratio;
}

Eigen::Vector2d StiffnessTorques(const RobotModel& model,
                                 const Configuration& cfg,
                                 const Eigen::Vector2d& joint_rates, double k,
                                 double feedforward, const EsGains& gains) {
  const Eigen::Matrix2d jac = EndEffectorJacobian(model, cfg);
  const double y = ForwardKinematics(model, cfg)[1];
  const double y_rate = (jac * joint_rates)[1];
  const Eigen::Vector2d force(-k * feedforward,
                              -gains.kp_y * y - gains.kd_y * y_rate);
  return jac.transpose() * force;
}

double FlightHeight(double t, double t_l, double x_l, double xd_l, double g) {
  return 0.5 * g * (t * t - t_l * t_l) - g * t_l * (t - t_l) +
         xd_l * (t - t_l) + x_l;
}

double BallisticApex(double x_l, double xd_l, double g) {
  if (xd_l <= 0.0 || g >= 0.0) return x_l;
  return x_l - 0.5 * xd_l * xd_l / g;
}

Eigen::Vector2d PdTorques(const Eigen::Vector2d& q_target,
                          const Eigen::Vector2d& q, const Eigen::Vector2d& qd,
                          const Eigen::Vector2d& kp,
                          const Eigen::Vector2d& kd) {
  return kp.cwiseProduct(q_target - q) - kd.cwiseProduct(qd);
}

Eigen::Vector2d PdTorques(const Eigen::Vector2d& q_target,
                          const Eigen::Vector2d& q, const Eigen::Vector2d& qd,
                          double kp, double kd) {
  return kp * (q_target - q) - kd * qd;
}

double StandingHeight(const RobotModel& model, const EsGains& gains) {
  return model.ground_height + gains.standing_extension * model.LegLength();
}

FsmOutput FsmStep(const ControllerState& ctrl, const ControllerObservation& obs,
                  const RobotModel& model, const EsGains& gains) {
  FsmOutput out;
  out.state = ctrl;
  ControllerState& next = out.state;
  const double x = obs.cfg.x;
  const double x_rate = obs.qd[0];
  const Eigen::Vector2d q = obs.cfg.Joints();
  const Eigen::Vector2d qd = obs.qd.tail<2>();
  const double g_mag = model.GravityMagnitude();

  auto flight_torques = [&] {
    return PdTorques(gains.flight_pose, q, qd, gains.flight_kp,
                     gains.flight_kd);
  };
  auto touchdown_torques = [&] {
    return PdTorques(gains.flight_pose, q, qd, gains.touchdown_kp,
                     gains.touchdown_kd);
  };
  auto liftoff_torques = [&] {
    const double stroke =
        std::max(StandingHeight(model, gains) - next.x0_j, gains.min_stroke);
    const double force = FeedforwardForce(model.m_total, g_mag,
                                          next.x_desired, next.x0_j, stroke);
    return StiffnessTorques(model, obs.cfg, qd, next.k, force, gains);
  };

  // Rescales k by the energy of the jump that just completed.
  auto adapt = [&](double apex) {
    next.x_peak_prev = apex;
    next.has_peak = true;
    const double reached = DesiredEnergy(model.m_total, g_mag, apex);
    if (reached > 0.0) {
      next.k = UpdateGain(
          next.k, DesiredEnergy(model.m_total, g_mag, next.x_desired), reached);
    }
  };

  switch (ctrl.phase) {
    case Phase::kLiftOff: {
      next.x_push_peak = std::max(next.x_push_peak, x);
      // A push that tops out without breaking contact ends the lift-off as a
      // zero-height jump so the gain still adapts.
      const bool stalled = obs.contact && x_rate < 0.0 &&
                           next.x_push_peak > next.x0_j + gains.min_stroke;
      if (!obs.contact || stalled) {
        next.phase = Phase::kFlight;
        next.x_liftoff = x;
        next.xd_liftoff = stalled ? 0.0 : x_rate;
        next.t_liftoff = obs.t;
        next.x_flight_peak = next.x_push_peak;
        if (gains.apex_feedback == ApexFeedback::kBallistic) {
          adapt(std::max(next.x_push_peak,
                         BallisticApex(x, next.xd_liftoff, model.gravity)));
        }
        out.tau = flight_torques();
      } else {
        out.tau = liftoff_torques();
      }
      break;
    }
    case Phase::kFlight:
      next.x_flight_peak = std::max(next.x_flight_peak, x);
      if (obs.contact) {
        next.phase = Phase::kTouchdown;
        next.x0_j = x;
        if (gains.apex_feedback == ApexFeedback::kMeasured) {
          adapt(next.x_flight_peak);
        }
        out.tau = touchdown_torques();
      } else {
        out.tau = flight_torques();
      }
      break;
    case Phase::kTouchdown:
      next.x0_j = std::min(next.x0_j, x);
      if (x_rate >= 0.0) {
        next.phase = Phase::kLiftOff;
        next.x_push_peak = x;
        ++next.liftoffs;
        out.tau = liftoff_torques();
      } else {
        out.tau = touchdown_torques();
      }
      break;
  }
  return out;
}

}  // namespace hopper
