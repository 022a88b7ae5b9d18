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

#include "hopper/sysid.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "hopper/control.h"
#include "hopper/errors.h"

namespace hopper {

std::string BaseConfigName(BaseConfig config) {
  return config == BaseConfig::kFixedBase ? "fixed-base" : "moving-base";
}

BaseConfig ParseBaseConfig(const std::string& name) {
  if (name == "fixed-base") return BaseConfig::kFixedBase;
  if (name == "moving-base") return BaseConfig::kMovingBase;
  throw ConfigError("sysid.config",
                    "expected fixed-base or moving-base, got '" + name + "'");
}

void Validate(const TrajectorySpec& spec, const RobotModel& model) {
  if (!(spec.amplitude >= 0.0)) {
    throw ConfigError("sysid.amplitude", "must be >= 0");
  }
  if (!(spec.period1 > 0.0)) throw ConfigError("sysid.period1", "must be > 0");
  if (!(spec.period2 > 0.0)) throw ConfigError("sysid.period2", "must be > 0");
  if (!(spec.duration > 0.0)) {
    throw ConfigError("sysid.duration", "must be > 0");
  }
  if (!(spec.sample_rate > 0.0)) {
    throw ConfigError("sysid.sample_rate", "must be > 0");
  }
  if (model.LegLength() - spec.amplitude < 0.0) {
    throw ConfigError("sysid.amplitude", "exceeds the leg length");
  }
}

namespace {

int SampleCount(const TrajectorySpec& spec) {
  return static_cast<int>(std::llround(spec.duration * spec.sample_rate)) + 1;
}

}  // namespace

TaskTrajectory GenerateFixedBase(const TrajectorySpec& spec,
                                 const RobotModel& model) {
  Validate(spec, model);
  const double offset = model.LegLength() - spec.amplitude;
  const double two_pi = 2.0 * std::numbers::pi;
  TaskTrajectory out(SampleCount(spec));
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double t = k / spec.sample_rate;
    const double r = spec.amplitude * std::cos(two_pi * t / spec.period1) + offset;
    const double theta =
        -0.5 * std::numbers::pi * std::cos(two_pi * t / spec.period2);
    out[k] = {t, r * std::cos(theta), r * std::sin(theta)};
  }
  return out;
}

TaskTrajectory GenerateMovingBase(const TrajectorySpec& spec,
                                  const RobotModel& model) {
  Validate(spec, model);
  const double offset = model.LegLength() - spec.amplitude;
  const double two_pi = 2.0 * std::numbers::pi;
  TaskTrajectory out(SampleCount(spec));
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double t = k / spec.sample_rate;
    out[k] = {t, spec.amplitude * std::cos(two_pi * t / spec.period1) + offset,
              0.0};
  }
  return out;
}

TaskTrajectory GenerateTrajectory(const TrajectorySpec& spec,
                                  const RobotModel& model) {
  return spec.config == BaseConfig::kFixedBase ? GenerateFixedBase(spec, model)
                                               : GenerateMovingBase(spec, model);
}

std::vector<Eigen::Vector2d> JointTargets(const TaskTrajectory& trajectory,
                                          const RobotModel& model) {
  std::vector<Eigen::Vector2d> targets;
  targets.reserve(trajectory.size());
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    try {
      targets.push_back(
          InverseKinematics(model, 0.0, TaskToHipOffset(trajectory[k]))
              .Joints());
    } catch (const OutOfWorkspaceError& e) {
      throw OutOfWorkspaceError(
          "trajectory sample " + std::to_string(k) + ": " + e.what(),
          e.radius());
    }
  }
  return targets;
}

std::vector<TrajectorySpec> ExcitationGrid(BaseConfig config,
                                           const std::vector<double>& period1,
                                           const std::vector<double>& period2,
                                           const std::vector<double>& amplitude,
                                           double total_duration) {
  std::vector<TrajectorySpec> grid;
  const std::vector<double> sweep =
      config == BaseConfig::kFixedBase ? period2 : std::vector<double>{1.0};
  for (double a : amplitude) {
    for (double t2 : sweep) {
      for (double t1 : period1) {
        TrajectorySpec spec;
        spec.config = config;
        spec.amplitude = a;
        spec.period1 = t1;
        spec.period2 = t2;
        grid.push_back(spec);
      }
    }
  }
  for (auto& spec : grid) spec.duration = total_duration / grid.size();
  return grid;
}

std::vector<TrajectorySpec> DefaultExcitationGrid(BaseConfig config,
                                                  double total_duration) {
  return ExcitationGrid(config, {0.75, 0.5, 0.25}, {10.0, 20.0},
                        {0.15, 0.1, 0.05}, total_duration);
}

std::vector<TrajectorySpec> DeskExcitationGrid() {
  using B = BaseConfig;
  return {{B::kFixedBase, 0.1, 0.5, 10.0, 5.0, 200.0},
          {B::kFixedBase, 0.05, 0.25, 10.0, 5.0, 200.0},
          {B::kMovingBase, 0.05, 0.75, 1.0, 5.0, 200.0},
          {B::kMovingBase, 0.05, 0.5, 1.0, 5.0, 200.0}};
}

std::string RunName(const TrajectorySpec& spec) {
  char buf[128];
  if (spec.config == BaseConfig::kFixedBase) {
    std::snprintf(buf, sizeof(buf), "fixed-base_A%g_T1-%g_T2-%g",
                  spec.amplitude, spec.period1, spec.period2);
  } else {
    std::snprintf(buf, sizeof(buf), "moving-base_A%g_T1-%g", spec.amplitude,
                  spec.period1);
  }
  return buf;
}

void WriteTaskCsv(const std::string& path, const TaskTrajectory& trajectory) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << "t,x,y\n";
  char buf[128];
  for (const auto& s : trajectory) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s.t, s.x, s.y);
    out << buf;
  }
}

TaskTrajectory ReadTaskCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "t,x,y") {
    throw Error(path + ":1: expected header t,x,y");
  }
  TaskTrajectory out;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    TaskSample s;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf%c", &s.t, &s.x, &s.y, &tail) !=
        3) {
      throw Error(path + ":" + std::to_string(number) + ": malformed row");
    }
    out.push_back(s);
  }
  return out;
}

TrajectoryLog Replay(const TaskTrajectory& trajectory, BaseConfig config,
                     const RobotModel& model, const SimParams& params,
                     const ReplaySettings& settings) {
  if (trajectory.empty()) throw Error("empty trajectory");
  const std::vector<Eigen::Vector2d> targets = JointTargets(trajectory, model);
  const double sample_dt =
      trajectory.size() > 1 ? trajectory[1].t - trajectory[0].t : 1.0;

  SimState initial;
  EpisodeSettings episode;
  if (config == BaseConfig::kFixedBase) {
    initial.q << model.ground_height + model.LegLength() +
                     settings.fixed_base_clearance,
        targets.front();
    episode.step.rail_locked = true;
  } else {
    initial = StandingState(model, params, targets.front());
  }
  episode.control_dt = 1.0 / settings.control_rate;
  episode.physics_substeps = settings.physics_substeps;
  episode.duration = trajectory.back().t - trajectory.front().t;

  auto controller = [&](const SimState& state) -> Eigen::Vector2d {
    const auto index = static_cast<std::size_t>(std::min<double>(
        std::llround(state.t / sample_dt), targets.size() - 1));
    return PdTorques(targets[index], state.q.tail<2>(), state.qd.tail<2>(),
                     settings.kp, settings.kd);
  };
  return RunEpisode(initial, controller, model, params, episode);
}

double TrajectoryCost(const TrajectoryLog& sim, const TrajectoryLog& real) {
  if (sim.size() != real.size()) {
    throw AlignmentError("logs differ in length: " +
                         std::to_string(sim.size()) + " vs " +
                         std::to_string(real.size()));
  }
  double cost = 0.0;
  for (std::size_t k = 0; k < sim.size(); ++k) {
    if (std::abs(sim[k].t - real[k].t) > 1e-6) {
      throw AlignmentError("timestamps differ at sample " + std::to_string(k));
    }
    for (int i = 1; i <= 2; ++i) {
      const double d = sim[k].q[i] - real[k].q[i];
      cost += d * d;
    }
  }
  return cost;
}

double MaxTrackingError(const TrajectoryLog& log,
                        const std::vector<Eigen::Vector2d>& targets) {
  double worst = 0.0;
  const std::size_t n = std::min(log.size(), targets.size());
  for (std::size_t k = 0; k < n; ++k) {
    for (int i = 0; i < 2; ++i) {
      worst = std::max(worst, std::abs(log[k].q[i + 1] - targets[k][i]));
    }
  }
  return worst;
}

const std::vector<std::string>& IdentifiableParamNames() {
  static const std::vector<std::string> kNames = {
      "rail_frictionloss", "rail_damping",          "hip_frictionloss",
      "hip_damping",       "hip_armature",          "knee_frictionloss",
      "knee_damping",      "knee_armature",         "iz1",
      "iz2",               "contact_time_constant", "contact_damping_ratio"};
  return kNames;
}

bool IsContactOrInertia(const std::string& name) {
  return name == "iz1" || name == "iz2" || name == "contact_time_constant" ||
         name == "contact_damping_ratio";
}

namespace {

double* Field(SimParams& p, const std::string& name) {
  if (name == "rail_frictionloss") return &p.rail_frictionloss;
  if (name == "rail_damping") return &p.rail_damping;
  if (name == "hip_frictionloss") return &p.hip_frictionloss;
  if (name == "hip_damping") return &p.hip_damping;
  if (name == "hip_armature") return &p.hip_armature;
  if (name == "knee_frictionloss") return &p.knee_frictionloss;
  if (name == "knee_damping") return &p.knee_damping;
  if (name == "knee_armature") return &p.knee_armature;
  if (name == "iz1") return &p.iz1;
  if (name == "iz2") return &p.iz2;
  if (name == "contact_time_constant") return &p.contact_time_constant;
  if (name == "contact_damping_ratio") return &p.contact_damping_ratio;
  throw ConfigError("sim." + name, "unknown parameter");
}

}  // namespace

double GetParam(const SimParams& params, const std::string& name) {
  return *Field(const_cast<SimParams&>(params), name);
}

void SetParam(SimParams& params, const std::string& name, double value) {
  *Field(params, name) = value;
}

ParamVector MakeParamVector(const SimParams& params, double spread) {
  ParamVector out;
  for (const auto& name : IdentifiableParamNames()) {
    const double v = GetParam(params, name);
    out.push_back({name, v, v / spread, v * spread, false});
  }
  return out;
}

SimParams ApplyParams(SimParams base, const ParamVector& vector) {
  for (const auto& e : vector) SetParam(base, e.name, e.value);
  return base;
}

double DatasetCost(const std::vector<RecordedRun>& runs,
                   const RobotModel& model, const SimParams& params,
                   const ReplaySettings& replay) {
  double total = 0.0;
  for (const auto& run : runs) {
    TrajectoryLog sim;
    try {
      sim = Replay(run.trajectory, run.config, model, params, replay);
    } catch (const IntegrationDivergedError&) {
      return std::numeric_limits<double>::infinity();
    }
    total += TrajectoryCost(sim, run.log);
  }
  return total;
}

namespace {

// Optimizes the unfrozen entries of `vector` in log space.
FitPass RunPass(const std::string& name, const std::vector<RecordedRun>& runs,
                const RobotModel& model, const SimParams& base,
                const ParamVector& vector, const FitSettings& settings) {
  std::vector<int> free;
  for (int i = 0; i < static_cast<int>(vector.size()); ++i) {
    if (!vector[i].frozen) free.push_back(i);
  }
  FitPass pass;
  pass.name = name;
  auto decode = [&](const Eigen::VectorXd& z) {
    ParamVector v = vector;
    for (int j = 0; j < static_cast<int>(free.size()); ++j) {
      ParamEntry& e = v[free[j]];
      e.value = std::clamp(std::exp(z[j]), e.lower, e.upper);
    }
    return v;
  };
  auto cost_of = [&](const ParamVector& v) {
    return DatasetCost(runs, model, ApplyParams(base, v), settings.replay);
  };
  pass.initial_cost = cost_of(vector);
  if (free.empty()) {
    pass.final_cost = pass.initial_cost;
    pass.result = vector;
    pass.stop_reason = "nothing_to_fit";
    return pass;
  }

  const int n = static_cast<int>(free.size());
  Eigen::VectorXd z0(n);
  CmaesSettings cma = settings.cmaes;
  cma.lower.resize(n);
  cma.upper.resize(n);
  for (int j = 0; j < n; ++j) {
    const ParamEntry& e = vector[free[j]];
    z0[j] = std::log(e.value);
    cma.lower[j] = std::log(e.lower);
    cma.upper[j] = std::log(e.upper);
  }
  const CmaesResult r = CmaesMinimize(
      [&](const Eigen::VectorXd& z) { return cost_of(decode(z)); }, z0, cma);
  pass.result = decode(r.x);
  pass.final_cost = r.cost;
  pass.evaluations = r.evaluations;
  pass.stop_reason = r.stop_reason;
  for (const auto& g : r.history) pass.best_costs.push_back(g.best_cost);
  return pass;
}

}  // namespace

FitReport FitParameters(const std::vector<RecordedRun>& runs,
                        const RobotModel& model, const SimParams& base,
                        const ParamVector& initial,
                        const FitSettings& settings) {
  for (const auto& e : initial) {
    if (!(e.lower > 0.0) || e.lower > e.value || e.value > e.upper) {
      throw ConfigError("sim." + e.name,
                        "needs 0 < lower <= value <= upper for the fit");
    }
  }
  FitReport report;
  report.initial = initial;

  ParamVector first = initial;
  for (auto& e : first) e.frozen = e.frozen || IsContactOrInertia(e.name);
  report.passes.push_back(
      RunPass("pass1", runs, model, base, first, settings));

  ParamVector second = report.passes.back().result;
  const double rho = settings.second_pass_factor;
  for (std::size_t i = 0; i < second.size(); ++i) {
    ParamEntry& e = second[i];
    e.frozen = initial[i].frozen;
    if (!IsContactOrInertia(e.name)) {
      e.lower = std::max(initial[i].lower, e.value / rho);
      e.upper = std::min(initial[i].upper, e.value * rho);
    }
  }
  report.passes.push_back(
      RunPass("pass2", runs, model, base, second, settings));

  report.fitted = report.passes.back().result;
  report.initial_cost = report.passes.front().initial_cost;
  report.final_cost = report.passes.back().final_cost;
  return report;
}

void WriteFitReportJson(const std::string& path, const FitReport& report) {
  using nlohmann::ordered_json;
  auto table = [](const ParamVector& v) {
    ordered_json rows = ordered_json::array();
    for (const auto& e : v) {
      rows.push_back({{"name", e.name},
                      {"value", e.value},
                      {"lower", e.lower},
                      {"upper", e.upper},
                      {"frozen", e.frozen}});
    }
    return rows;
  };
  ordered_json doc;
  doc["initial_cost"] = report.initial_cost;
  doc["final_cost"] = report.final_cost;
  doc["initial"] = table(report.initial);
  doc["passes"] = ordered_json::array();
  for (const auto& p : report.passes) {
    doc["passes"].push_back({{"name", p.name},
                             {"initial_cost", p.initial_cost},
                             {"final_cost", p.final_cost},
                             {"evaluations", p.evaluations},
                             {"stop_reason", p.stop_reason},
                             {"best_costs", p.best_costs},
                             {"parameters", table(p.result)}});
  }
  // Grouped like the published parameter table.
  auto value = [&](const std::string& name) {
    for (const auto& e : report.fitted) {
      if (e.name == name) return e.value;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  doc["table"] = {
      {"rail_prismatic_joint",
       {{"frictionloss", value("rail_frictionloss")},
        {"damping", value("rail_damping")}}},
      {"hip_joint",
       {{"frictionloss", value("hip_frictionloss")},
        {"damping", value("hip_damping")},
        {"armature", value("hip_armature")}}},
      {"knee_joint",
       {{"frictionloss", value("knee_frictionloss")},
        {"damping", value("knee_damping")},
        {"armature", value("knee_armature")}}},
      {"link_z_inertia", {{"hip", value("iz1")}, {"knee", value("iz2")}}},
      {"solver",
       {{"time_constant", value("contact_time_constant")},
        {"damping_ratio", value("contact_damping_ratio")}}}};
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

}  // namespace hopper
