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

#ifndef HOPPER_SYSID_H_
#define HOPPER_SYSID_H_

#include <string>
#include <vector>

#include <Eigen/Core>

#include "hopper/cmaes.h"
#include "hopper/model.h"
#include "hopper/sim.h"
#include "hopper/trajectory_log.h"

namespace hopper {

// Excitation trajectories are written in a hip frame whose x axis points
// down along the extended leg; TaskToHipOffset maps them to world axes.

enum class BaseConfig { kFixedBase, kMovingBase };

std::string BaseConfigName(BaseConfig config);
// Accepts "fixed-base" and "moving-base". Throws ConfigError otherwise.
BaseConfig ParseBaseConfig(const std::string& name);

struct TrajectorySpec {
  BaseConfig config = BaseConfig::kFixedBase;
  double amplitude = 0.1;  // m
  double period1 = 0.5;    // radial period, s
  double period2 = 10.0;   // sweep period (fixed base only), s
  double duration = 10.0;  // s
  double sample_rate = 200.0;
};

// Throws ConfigError when a field is out of range or the fixed-base offset
// l1 + l2 - A is negative.
void Validate(const TrajectorySpec& spec, const RobotModel& model);

struct TaskSample {
  double t = 0.0;
  double x = 0.0;  // along the leg, down
  double y = 0.0;
};

using TaskTrajectory = std::vector<TaskSample>;

// r = A cos(2 pi t / T1) + (l1 + l2 - A), theta = -(pi/2) cos(2 pi t / T2),
// (x, y) = r (cos theta, sin theta).
TaskTrajectory GenerateFixedBase(const TrajectorySpec& spec,
                                 const RobotModel& model);
// x = A cos(2 pi t / T1) + (l1 + l2 - A), y = 0.
TaskTrajectory GenerateMovingBase(const TrajectorySpec& spec,
                                  const RobotModel& model);
TaskTrajectory GenerateTrajectory(const TrajectorySpec& spec,
                                  const RobotModel& model);

// Foot position relative to the hip in world axes.
inline Eigen::Vector2d TaskToHipOffset(const TaskSample& s) {
  return {-s.x, s.y};
}

// Joint targets for every sample. Throws OutOfWorkspaceError naming the
// sample index.
std::vector<Eigen::Vector2d> JointTargets(const TaskTrajectory& trajectory,
                                          const RobotModel& model);

// The grid T1 x T2 x A (T2 is dropped for the moving base) sharing
// `total_duration` equally.
std::vector<TrajectorySpec> ExcitationGrid(BaseConfig config,
                                           const std::vector<double>& period1,
                                           const std::vector<double>& period2,
                                           const std::vector<double>& amplitude,
                                           double total_duration);
std::vector<TrajectorySpec> DefaultExcitationGrid(BaseConfig config,
                                                  double total_duration = 240.0);

// Four 5 s runs (two per base configuration) for fits that must finish in
// under a minute. Leaves out excitations where the moving base bounces
// chaotically, which make the cost non-smooth.
std::vector<TrajectorySpec> DeskExcitationGrid();

// File stem such as "fixed-base_A0.1_T1-0.5_T2-10".
std::string RunName(const TrajectorySpec& spec);

// Task trajectories as CSV with header "t,x,y", 17 significant digits.
void WriteTaskCsv(const std::string& path, const TaskTrajectory& trajectory);
// Throws Error with the offending line number on malformed input.
TaskTrajectory ReadTaskCsv(const std::string& path);

struct ReplaySettings {
  Eigen::Vector2d kp{200.0, 50.0};
  Eigen::Vector2d kd{2.0, 0.15};
  double control_rate = 200.0;
  int physics_substeps = 5;
  // Carriage height for the fixed base, above the ground plus leg length.
  double fixed_base_clearance = 0.1;
};

// Tracks the joint targets with a PD controller (zero target velocity) in
// the simulator and logs at every control tick. Fixed-base replays lock the
// carriage clear of the ground; moving-base replays start standing.
TrajectoryLog Replay(const TaskTrajectory& trajectory, BaseConfig config,
                     const RobotModel& model, const SimParams& params,
                     const ReplaySettings& settings = {});

// Sum over samples and both actuated joints of the squared position error.
// Throws AlignmentError on length or timestamp mismatch.
double TrajectoryCost(const TrajectoryLog& sim, const TrajectoryLog& real);

// Largest joint tracking error of a replay against its targets.
double MaxTrackingError(const TrajectoryLog& log,
                        const std::vector<Eigen::Vector2d>& targets);

struct ParamEntry {
  std::string name;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool frozen = false;
};

using ParamVector = std::vector<ParamEntry>;

// Names of the identifiable SimParams fields, in a fixed order.
const std::vector<std::string>& IdentifiableParamNames();
bool IsContactOrInertia(const std::string& name);

double GetParam(const SimParams& params, const std::string& name);
void SetParam(SimParams& params, const std::string& name, double value);

// Every identifiable field of `params` with bounds [value / spread,
// value * spread], unfrozen.
ParamVector MakeParamVector(const SimParams& params, double spread = 10.0);
SimParams ApplyParams(SimParams base, const ParamVector& vector);

struct RecordedRun {
  std::string name;
  BaseConfig config = BaseConfig::kFixedBase;
  TaskTrajectory trajectory;
  TrajectoryLog log;
};

struct FitSettings {
  CmaesSettings cmaes;  // sigma0 is in log-parameter units
  double second_pass_factor = 3.0;
  ReplaySettings replay;
};

struct FitPass {
  std::string name;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int evaluations = 0;
  std::string stop_reason;
  std::vector<double> best_costs;  // per generation
  ParamVector result;
};

struct FitReport {
  ParamVector initial;
  std::vector<FitPass> passes;
  ParamVector fitted;
  double initial_cost = 0.0;
  double final_cost = 0.0;
};

// Sum of TrajectoryCost over the runs, replaying with `params`.
double DatasetCost(const std::vector<RecordedRun>& runs,
                   const RobotModel& model, const SimParams& params,
                   const ReplaySettings& replay);

// Two passes of CMA-ES in log-parameter space. Pass 1 freezes inertias and
// contact constants and fits friction, damping and armature. Pass 2 fits
// everything, with the pass-1 parameters bounded to [x / rho, x * rho].
// Entries frozen in `initial` stay frozen in both passes.
FitReport FitParameters(const std::vector<RecordedRun>& runs,
                        const RobotModel& model, const SimParams& base,
                        const ParamVector& initial,
                        const FitSettings& settings);

void WriteFitReportJson(const std::string& path, const FitReport& report);

}  // namespace hopper

#endif  // HOPPER_SYSID_H_
