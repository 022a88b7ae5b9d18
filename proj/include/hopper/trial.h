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

#ifndef HOPPER_TRIAL_H_
#define HOPPER_TRIAL_H_

#include <string>
#include <vector>

#include "hopper/control.h"
#include "hopper/model.h"
#include "hopper/sim.h"
#include "hopper/trajectory_log.h"

namespace hopper {

// Piecewise-constant height command: `height` applies from `start` on.
struct CommandSegment {
  double start = 0.0;
  double height = 0.3;
};

using CommandSchedule = std::vector<CommandSegment>;

double CommandAt(const CommandSchedule& schedule, double t);

// `count` segments of `period` seconds starting at `first`, rising by `step`.
CommandSchedule SteppedSchedule(double first, double step, int count,
                                double period);

enum class TrialController { kEnergyShaping, kZero, kReplay };

struct TrialSettings {
  TrialController controller = TrialController::kEnergyShaping;
  CommandSchedule schedule = {{0.0, 0.3}};
  double duration = 15.0;
  double control_rate = 400.0;  // Hz
  int physics_substeps = 5;
  // Torques for kReplay, applied at the log's sample period.
  TrajectoryLog replay_torques;
};

struct JumpRecord {
  double t_liftoff = 0.0;
  double t_touchdown = 0.0;
  double t_apex = 0.0;
  double apex = 0.0;
  double command = 0.0;
};

struct PhaseEvent {
  double t = 0.0;
  Phase phase = Phase::kTouchdown;
  double gain = 1.0;  // energy-shaping gain after the change
};

struct CommandSummary {
  double command = 0.0;
  int count = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct TrialReport {
  std::vector<JumpRecord> jumps;
  // Controller phase changes (energy-shaping controller only).
  std::vector<PhaseEvent> timeline;
  std::vector<double> commands;
  CommandSchedule schedule;
  std::vector<CommandSummary> summary;
};

struct TrialResult {
  TrajectoryLog log;
  TrialReport report;
  // Set when the run diverged; `log` then holds the samples before it.
  std::string error;
};

TrialResult RunTrial(const RobotModel& model, const SimParams& params,
                     const EsGains& gains, const TrialSettings& settings);

// Completed flight phases in a log: the highest base sample between a
// contact -> no-contact and the next no-contact -> contact transition.
std::vector<JumpRecord> DetectJumps(const TrajectoryLog& log,
                                    const CommandSchedule& schedule);

// Median and quartiles of apexes grouped by command, after dropping the
// first `discard` jumps of every contiguous command segment.
std::vector<CommandSummary> Summarize(const std::vector<JumpRecord>& jumps,
                                      int discard = 0);

std::vector<double> ApexesFor(const std::vector<JumpRecord>& jumps,
                              double command, int discard = 0);

void WriteReportJson(const std::string& path, const TrialReport& report);

}  // namespace hopper

#endif  // HOPPER_TRIAL_H_
