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

#include "hopper/trial.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "hopper/errors.h"
#include "hopper/stats.h"

namespace hopper {

double CommandAt(const CommandSchedule& schedule, double t) {
  if (schedule.empty()) throw Error("empty command schedule");
  double height = schedule.front().height;
  for (const CommandSegment& segment : schedule) {
    if (segment.start <= t + 1e-12) height = segment.height;
  }
  return height;
}

CommandSchedule SteppedSchedule(double first, double step, int count,
                                double period) {
  CommandSchedule schedule;
  for (int i = 0; i < count; ++i) {
    // Rounded to micrometres so 0.25 + 3 * 0.02 prints as 0.31.
    const double height = std::round((first + i * step) * 1e6) / 1e6;
    schedule.push_back({i * period, height});
  }
  return schedule;
}

std::vector<JumpRecord> DetectJumps(const TrajectoryLog& log,
                                    const CommandSchedule& schedule) {
  std::vector<JumpRecord> jumps;
  bool in_flight = false;
  JumpRecord current;
  for (size_t i = 1; i < log.size(); ++i) {
    const LogSample& prev = log[i - 1];
    const LogSample& s = log[i];
    if (!in_flight && prev.contact && !s.contact) {
      in_flight = true;
      current = JumpRecord{};
      current.t_liftoff = s.t;
      current.apex = s.q[0];
      current.t_apex = s.t;
    } else if (in_flight && s.contact) {
      in_flight = false;
      current.t_touchdown = s.t;
      current.command = CommandAt(schedule, current.t_apex);
      jumps.push_back(current);
    } else if (in_flight && s.q[0] > current.apex) {
      current.apex = s.q[0];
      current.t_apex = s.t;
    }
  }
  return jumps;
}

std::vector<double> ApexesFor(const std::vector<JumpRecord>& jumps,
                              double command, int discard) {
  std::vector<double> apexes;
  int seen_in_segment = 0;
  bool in_segment = false;
  for (const JumpRecord& jump : jumps) {
    if (jump.command == command) {
      if (!in_segment) seen_in_segment = 0;
      in_segment = true;
      if (seen_in_segment++ >= discard) apexes.push_back(jump.apex);
    } else {
      in_segment = false;
    }
  }
  return apexes;
}

std::vector<CommandSummary> Summarize(const std::vector<JumpRecord>& jumps,
                                      int discard) {
  std::vector<double> commands;
  for (const JumpRecord& jump : jumps) {
    if (std::find(commands.begin(), commands.end(), jump.command) ==
        commands.end()) {
      commands.push_back(jump.command);
    }
  }
  std::vector<CommandSummary> summary;
  for (double command : commands) {
    const std::vector<double> apexes = ApexesFor(jumps, command, discard);
    CommandSummary s;
    s.command = command;
    s.count = static_cast<int>(apexes.size());
    if (!apexes.empty()) {
      s.median = Quantile(apexes, 0.5);
      s.q1 = Quantile(apexes, 0.25);
      s.q3 = Quantile(apexes, 0.75);
    }
    summary.push_back(s);
  }
  return summary;
}

TrialResult RunTrial(const RobotModel& model, const SimParams& params,
                     const EsGains& gains, const TrialSettings& settings) {
  TrialResult result;
  const SimState initial = StandingState(model, params, gains.flight_pose);

  EpisodeSettings episode;
  episode.duration = settings.duration;
  episode.control_dt = 1.0 / settings.control_rate;
  episode.physics_substeps = settings.physics_substeps;

  ControllerState ctrl = InitialControllerState(
      CommandAt(settings.schedule, 0.0), gains, initial.q[0]);
  std::vector<PhaseEvent>& timeline = result.report.timeline;

  ControllerCallback controller;
  switch (settings.controller) {
    case TrialController::kEnergyShaping:
      timeline.push_back({initial.t, ctrl.phase, ctrl.k});
      controller = [&](const SimState& state) {
        ControllerObservation obs;
        obs.cfg = state.Config();
        obs.qd = state.qd;
        obs.contact = state.f_normal > gains.contact_threshold;
        obs.t = state.t;
        ctrl.x_desired = CommandAt(settings.schedule, state.t);
        const FsmOutput out = FsmStep(ctrl, obs, model, gains);
        if (out.state.phase != ctrl.phase) {
          timeline.push_back({state.t, out.state.phase, out.state.k});
        }
        ctrl = out.state;
        return out.tau;
      };
      break;
    case TrialController::kZero:
      controller = [](const SimState&) { return Eigen::Vector2d::Zero(); };
      break;
    case TrialController::kReplay: {
      const TrajectoryLog& torques = settings.replay_torques;
      if (torques.empty()) throw Error("replay controller needs a torque log");
      controller = [&torques](const SimState& state) {
        // Last sample at or before t.
        auto it = std::upper_bound(
            torques.begin(), torques.end(), state.t + 1e-9,
            [](double t, const LogSample& s) { return t < s.t; });
        if (it == torques.begin()) return torques.front().tau;
        return std::prev(it)->tau;
      };
      break;
    }
  }

  try {
    RunEpisodeInto(initial, controller, model, params, episode, result.log);
  } catch (const IntegrationDivergedError& e) {
    result.error = e.what();
  }

  TrialReport& report = result.report;
  report.jumps = DetectJumps(result.log, settings.schedule);
  for (const CommandSegment& segment : settings.schedule) {
    if (segment.start < settings.duration) {
      report.commands.push_back(segment.height);
      report.schedule.push_back(segment);
    }
  }
  report.summary = Summarize(report.jumps);
  return result;
}

void WriteReportJson(const std::string& path, const TrialReport& report) {
  nlohmann::ordered_json doc;
  doc["commands"] = report.commands;
  auto& schedule = doc["schedule"] = nlohmann::ordered_json::array();
  for (const CommandSegment& segment : report.schedule) {
    schedule.push_back({{"start", segment.start}, {"height", segment.height}});
  }
  auto& jumps = doc["jumps"] = nlohmann::ordered_json::array();
  for (const JumpRecord& jump : report.jumps) {
    jumps.push_back({{"t_liftoff", jump.t_liftoff},
                     {"t_apex", jump.t_apex},
                     {"t_touchdown", jump.t_touchdown},
                     {"apex", jump.apex},
                     {"command", jump.command}});
  }
  auto& timeline = doc["timeline"] = nlohmann::ordered_json::array();
  for (const PhaseEvent& event : report.timeline) {
    timeline.push_back(
        {{"t", event.t},
         {"phase", std::string(PhaseName(event.phase))},
         {"gain", event.gain}});
  }
  auto& summary = doc["summary"] = nlohmann::ordered_json::array();
  for (const CommandSummary& s : report.summary) {
    summary.push_back({{"command", s.command},
                       {"count", s.count},
                       {"median", s.median},
                       {"q1", s.q1},
                       {"q3", s.q3}});
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
}

}  // namespace hopper
