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

// hopper: run trials, system identification, the environment server and
// plots from the command line. Errors are printed to stderr as one JSON line
// and the process exits nonzero.

#include <signal.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hopper/config.h"
#include "hopper/errors.h"
#include "hopper/plot.h"
#include "hopper/server.h"
#include "hopper/stats.h"
#include "hopper/sysid.h"
#include "hopper/trial.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace hopper {
namespace {

std::atomic<bool> g_stop{false};

void OnSignal(int) { g_stop = true; }

// No SA_RESTART, so a blocking read on stdin returns on ctrl-C.
void InstallSignalHandlers() {
  struct sigaction action {};
  action.sa_handler = OnSignal;
  sigemptyset(&action.sa_mask);
  sigaction(SIGINT, &action, nullptr);
  sigaction(SIGTERM, &action, nullptr);
}

struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out = "out";
};

void AddCommon(CLI::App* app, CommonOptions& options, bool with_out = true) {
  app->add_option("--config", options.config_path, "flat JSON config file");
  app->add_option("--seed", options.seed, "random seed");
  if (with_out) {
    app->add_option("--out", options.out, "output directory");
  }
}

HopperConfig Load(const CommonOptions& options) {
  return options.config_path.empty() ? DefaultConfig()
                                     : LoadConfig(options.config_path);
}

fs::path OutDir(const CommonOptions& options) {
  fs::path dir(options.out);
  fs::create_directories(dir);
  return dir;
}

std::string HeightStem(double h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", h);
  return buf;
}

void PrintLine(const ordered_json& doc) { std::cout << doc.dump() << std::endl; }

void PrintError(const std::string& kind, const std::string& message) {
  std::cerr << ordered_json{{"error", kind}, {"message", message}}.dump()
            << std::endl;
}

// ---------------------------------------------------------------- run

struct RunOptions {
  CommonOptions common;
  std::string controller = "es";
  std::vector<double> heights;
  std::vector<double> stepped;  // first, step, count, period
  double duration = 15.0;
  double rate = 400.0;
  int substeps = 5;
  std::string replay_log;
  int discard = 3;
};

TrialController ParseController(const std::string& name) {
  if (name == "es") return TrialController::kEnergyShaping;
  if (name == "zero") return TrialController::kZero;
  if (name == "replay") return TrialController::kReplay;
  throw Error("unknown controller '" + name + "'");
}

int CmdRun(const RunOptions& o) {
  const HopperConfig config = Load(o.common);
  TrialSettings base;
  base.controller = ParseController(o.controller);
  base.control_rate = o.rate;
  base.physics_substeps = o.substeps;
  if (base.controller == TrialController::kReplay) {
    if (o.replay_log.empty()) throw Error("--controller replay needs --replay-log");
    base.replay_torques = ReadLogCsv(o.replay_log);
  }

  // Either one trial on a stepped schedule or one trial per height.
  std::vector<std::pair<std::string, TrialSettings>> trials;
  if (!o.stepped.empty()) {
    if (o.stepped.size() != 4) {
      throw Error("--stepped expects first,step,count,period");
    }
    TrialSettings s = base;
    const int count = static_cast<int>(o.stepped[2]);
    s.schedule = SteppedSchedule(o.stepped[0], o.stepped[1], count, o.stepped[3]);
    s.duration = count * o.stepped[3];
    trials.emplace_back("stepped", s);
  } else {
    const std::vector<double> heights =
        o.heights.empty() ? std::vector<double>{0.3} : o.heights;
    for (double h : heights) {
      TrialSettings s = base;
      s.schedule = {{0.0, h}};
      s.duration = o.duration;
      trials.emplace_back(heights.size() == 1 ? "trial" : "trial_" + HeightStem(h),
                          s);
    }
  }

  const fs::path dir = OutDir(o.common);
  std::vector<JumpRecord> all_jumps;
  std::string error;
  for (const auto& [stem, settings] : trials) {
    TrialResult result = RunTrial(config.model, config.sim, config.es, settings);
    result.report.summary = Summarize(result.report.jumps, o.discard);
    WriteLogCsv((dir / (stem + ".csv")).string(), result.log);
    WriteReportJson((dir / (stem + ".json")).string(), result.report);
    if (!result.log.empty()) {
      WriteText((dir / (stem + "_height.svg")).string(),
                HeightTraceSvg(result.log, result.report.jumps,
                               result.report.schedule));
    }
    all_jumps.insert(all_jumps.end(), result.report.jumps.begin(),
                     result.report.jumps.end());
    if (!result.error.empty() && error.empty()) error = result.error;
  }
  WriteText((dir / "apex.svg").string(), ApexDistributionSvg(all_jumps, o.discard));

  ordered_json summary;
  summary["command"] = "run";
  summary["controller"] = o.controller;
  summary["jumps"] = all_jumps.size();
  auto& per = summary["summary"] = ordered_json::array();
  const std::vector<CommandSummary> rows = Summarize(all_jumps, o.discard);
  for (const CommandSummary& s : rows) {
    per.push_back({{"command", s.command},
                   {"count", s.count},
                   {"median", s.median},
                   {"q1", s.q1},
                   {"q3", s.q3}});
  }
  auto& tests = summary["rank_sum"] = ordered_json::array();
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto a = ApexesFor(all_jumps, rows[i - 1].command, o.discard);
    const auto b = ApexesFor(all_jumps, rows[i].command, o.discard);
    if (a.empty() || b.empty()) continue;
    tests.push_back({{"a", rows[i - 1].command},
                     {"b", rows[i].command},
                     {"p", RankSumTest(a, b).p_value}});
  }
  if (!error.empty()) summary["error"] = error;
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
  PrintLine(summary);
  if (!error.empty()) {
    // The partial logs are already on disk.
    PrintError("diverged", error);
    return 1;
  }
  return 0;
}

// -------------------------------------------------------------- sysid

struct SysidOptions {
  CommonOptions common;
  std::string base = "both";
  std::string grid;  // defaults to desk for --synthetic, full otherwise
  double total_duration = 240.0;
  std::string data;
  bool synthetic = false;
  double perturb = 1.5;
  int generations = 150;
  double sigma0 = 0.5;
  double rho = 3.0;
  int threads = 1;
};

std::vector<TrajectorySpec> SelectGrid(const SysidOptions& o) {
  std::vector<TrajectorySpec> specs;
  const std::string grid =
      o.grid.empty() ? (o.synthetic ? "desk" : "full") : o.grid;
  if (grid == "desk") {
    for (const auto& s : DeskExcitationGrid()) {
      if (o.base == "both" || ParseBaseConfig(o.base) == s.config) {
        specs.push_back(s);
      }
    }
    return specs;
  }
  if (grid != "full") throw Error("unknown grid '" + grid + "'");
  std::vector<BaseConfig> configs;
  if (o.base == "both") {
    configs = {BaseConfig::kFixedBase, BaseConfig::kMovingBase};
  } else {
    configs = {ParseBaseConfig(o.base)};
  }
  for (BaseConfig c : configs) {
    for (const auto& s : DefaultExcitationGrid(c, o.total_duration)) {
      specs.push_back(s);
    }
  }
  return specs;
}

ordered_json SpecJson(const TrajectorySpec& s) {
  return {{"name", RunName(s)},
          {"config", BaseConfigName(s.config)},
          {"amplitude", s.amplitude},
          {"period1", s.period1},
          {"period2", s.period2},
          {"duration", s.duration},
          {"sample_rate", s.sample_rate}};
}

std::vector<std::pair<std::string, BaseConfig>> ReadManifest(
    const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error("cannot open " + (dir / "manifest.json").string());
  nlohmann::json doc;
  try {
    in >> doc;
    std::vector<std::pair<std::string, BaseConfig>> runs;
    for (const auto& r : doc.at("runs")) {
      runs.emplace_back(r.at("name").get<std::string>(),
                        ParseBaseConfig(r.at("config").get<std::string>()));
    }
    return runs;
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad manifest: " + std::string(e.what()));
  }
}

int CmdSysidGenerate(const SysidOptions& o) {
  const HopperConfig config = Load(o.common);
  const fs::path dir = OutDir(o.common);
  ordered_json manifest;
  auto& runs = manifest["runs"] = ordered_json::array();
  for (const TrajectorySpec& spec : SelectGrid(o)) {
    const TaskTrajectory trajectory = GenerateTrajectory(spec, config.model);
    JointTargets(trajectory, config.model);  // rejects unreachable grids
    WriteTaskCsv((dir / (RunName(spec) + ".task.csv")).string(), trajectory);
    runs.push_back(SpecJson(spec));
  }
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  PrintLine({{"command", "sysid generate"}, {"runs", runs.size()},
             {"out", dir.string()}});
  return 0;
}

int CmdSysidReplay(const SysidOptions& o) {
  const HopperConfig config = Load(o.common);
  const fs::path data = o.data.empty() ? fs::path(o.common.out) : fs::path(o.data);
  const fs::path dir = OutDir(o.common);
  ordered_json summary;
  summary["command"] = "sysid replay";
  auto& rows = summary["runs"] = ordered_json::array();
  double worst = 0.0;
  for (const auto& [name, base] : ReadManifest(data)) {
    const TaskTrajectory trajectory =
        ReadTaskCsv((data / (name + ".task.csv")).string());
    const TrajectoryLog log =
        Replay(trajectory, base, config.model, config.sim, config.replay);
    WriteLogCsv((dir / (name + ".log.csv")).string(), log);
    const double error =
        MaxTrackingError(log, JointTargets(trajectory, config.model));
    worst = std::max(worst, error);
    rows.push_back({{"name", name}, {"max_tracking_error", error}});
  }
  summary["max_tracking_error"] = worst;
  std::ofstream(dir / "tracking.json") << summary.dump(2) << '\n';
  PrintLine(summary);
  return 0;
}

FitSettings MakeFitSettings(const SysidOptions& o, const HopperConfig& config) {
  FitSettings settings;
  settings.cmaes.sigma0 = o.sigma0;
  settings.cmaes.max_generations = o.generations;
  settings.cmaes.seed = o.common.seed;
  settings.cmaes.threads = o.threads;
  settings.second_pass_factor = o.rho;
  settings.replay = config.replay;
  return settings;
}

int CmdSysidFit(const SysidOptions& o) {
  const HopperConfig config = Load(o.common);
  std::vector<RecordedRun> runs;
  ParamVector initial = MakeParamVector(config.sim, 10.0);
  if (o.synthetic) {
    // Recovery experiment: the config's parameters are the ground truth and
    // the fit starts from a perturbed copy.
    for (const TrajectorySpec& spec : SelectGrid(o)) {
      RecordedRun run;
      run.name = RunName(spec);
      run.config = spec.config;
      run.trajectory = GenerateTrajectory(spec, config.model);
      run.log = Replay(run.trajectory, run.config, config.model, config.sim,
                       config.replay);
      runs.push_back(std::move(run));
    }
    for (ParamEntry& e : initial) e.value *= o.perturb;
  } else {
    if (o.data.empty()) throw Error("sysid fit needs --data or --synthetic");
    const fs::path data(o.data);
    for (const auto& [name, base] : ReadManifest(data)) {
      RecordedRun run;
      run.name = name;
      run.config = base;
      run.trajectory = ReadTaskCsv((data / (name + ".task.csv")).string());
      run.log = ReadLogCsv((data / (name + ".log.csv")).string());
      runs.push_back(std::move(run));
    }
  }

  const auto start = std::chrono::steady_clock::now();
  const FitReport report = FitParameters(runs, config.model, config.sim,
                                         initial, MakeFitSettings(o, config));
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();

  const fs::path dir = OutDir(o.common);
  WriteFitReportJson((dir / "fit_report.json").string(), report);
  HopperConfig fitted = config;
  fitted.sim = ApplyParams(config.sim, report.fitted);
  SaveConfig((dir / "fitted_config.json").string(), fitted);

  ordered_json summary;
  summary["command"] = "sysid fit";
  summary["synthetic"] = o.synthetic;
  summary["runs"] = runs.size();
  summary["initial_cost"] = report.initial_cost;
  summary["final_cost"] = report.final_cost;
  if (report.final_cost > 0.0) {
    summary["reduction"] = report.initial_cost / report.final_cost;
  }
  summary["seconds"] = seconds;
  if (o.synthetic) {
    auto& ratio = summary["recovered_over_truth"] = ordered_json::object();
    for (const ParamEntry& e : report.fitted) {
      ratio[e.name] = e.value / GetParam(config.sim, e.name);
    }
  }
  PrintLine(summary);
  return 0;
}

// -------------------------------------------------------------- serve

struct ServeOptions {
  CommonOptions common;
  bool stdio = false;
  int port = -1;
};

int CmdServe(const ServeOptions& o) {
  HopperConfig config = Load(o.common);
  config.env.seed = o.common.seed;
  const EnvFactory make = [config] {
    return std::make_unique<HopperEnv>(config.model, config.sim, config.env);
  };
  InstallSignalHandlers();
  if (o.stdio) {
    ServeStream(std::cin, std::cout, make, &g_stop);
    std::cout.flush();
    return 0;
  }
  if (o.port < 0) throw Error("serve needs --stdio or --port");
  TcpServer server(make);
  const int port = server.Bind(o.port);
  std::cerr << ordered_json{{"listening", port}}.dump() << std::endl;
  std::thread watcher([&] {
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.Stop();
  });
  server.Run();
  g_stop = true;
  watcher.join();
  return 0;
}

// --------------------------------------------------------------- plot

struct PlotOptions {
  CommonOptions common;
  std::string log;
  std::string report;
  int discard = 3;
};

int CmdPlot(const PlotOptions& o) {
  if (o.log.empty() && o.report.empty()) {
    throw Error("plot needs --log and/or --report");
  }
  const fs::path dir = OutDir(o.common);
  std::vector<JumpRecord> jumps;
  CommandSchedule schedule;
  if (!o.report.empty()) ReadReportJson(o.report, jumps, schedule);
  ordered_json written = ordered_json::array();
  if (!o.log.empty()) {
    const TrajectoryLog log = ReadLogCsv(o.log);
    if (o.report.empty()) jumps = DetectJumps(log, {{0.0, 0.0}});
    const fs::path path =
        dir / (fs::path(o.log).stem().string() + "_height.svg");
    WriteText(path.string(), HeightTraceSvg(log, jumps, schedule));
    written.push_back(path.string());
  }
  const fs::path path = dir / "apex.svg";
  WriteText(path.string(), ApexDistributionSvg(jumps, o.discard));
  written.push_back(path.string());
  PrintLine({{"command", "plot"}, {"written", written}});
  return 0;
}

std::string ErrorKind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const IntegrationDivergedError*>(&e)) return "diverged";
  if (dynamic_cast<const OutOfWorkspaceError*>(&e)) return "workspace";
  if (dynamic_cast<const AlignmentError*>(&e)) return "alignment";
  if (dynamic_cast<const Error*>(&e)) return "hopper";
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return "io";
  return "internal";
}

}  // namespace
}  // namespace hopper

int main(int argc, char** argv) {
  using namespace hopper;
  CLI::App app{"Single-leg hopper simulation, identification and RL server"};
  app.require_subcommand(1);

  RunOptions run;
  CLI::App* run_cmd = app.add_subcommand("run", "run a hopping trial");
  AddCommon(run_cmd, run.common);
  run_cmd->add_option("--controller", run.controller, "es, zero or replay")
      ->check(CLI::IsMember({"es", "zero", "replay"}));
  run_cmd->add_option("--height", run.heights,
                      "commanded height(s) [m], one trial each");
  run_cmd->add_option("--stepped", run.stepped,
                      "stepped command: first step count period")
      ->expected(4)
      ->delimiter(',');
  run_cmd->add_option("--duration", run.duration, "trial length [s]");
  run_cmd->add_option("--rate", run.rate, "control rate [Hz]");
  run_cmd->add_option("--substeps", run.substeps, "physics steps per tick");
  run_cmd->add_option("--replay-log", run.replay_log, "CSV with torques");
  run_cmd->add_option("--discard", run.discard,
                      "transient jumps dropped per command segment");

  SysidOptions sysid;
  CLI::App* sysid_cmd =
      app.add_subcommand("sysid", "system identification pipeline");
  sysid_cmd->require_subcommand(1);
  auto add_grid = [&](CLI::App* cmd) {
    AddCommon(cmd, sysid.common);
    cmd->add_option("--base", sysid.base, "fixed-base, moving-base or both")
        ->check(CLI::IsMember({"fixed-base", "moving-base", "both"}));
    cmd->add_option("--grid", sysid.grid, "full or desk")
        ->check(CLI::IsMember({"full", "desk"}));
    cmd->add_option("--total-duration", sysid.total_duration,
                    "seconds of excitation per base configuration");
  };
  CLI::App* gen_cmd = sysid_cmd->add_subcommand("generate", "write task CSVs");
  add_grid(gen_cmd);
  CLI::App* replay_cmd =
      sysid_cmd->add_subcommand("replay", "replay task CSVs in simulation");
  AddCommon(replay_cmd, sysid.common);
  replay_cmd->add_option("--data", sysid.data, "directory from generate");
  CLI::App* fit_cmd = sysid_cmd->add_subcommand("fit", "two-pass CMA-ES fit");
  add_grid(fit_cmd);
  fit_cmd->add_option("--data", sysid.data, "directory with task and log CSVs");
  fit_cmd->add_flag("--synthetic", sysid.synthetic,
                    "recover the config's own parameters");
  fit_cmd->add_option("--perturb", sysid.perturb,
                      "initial guess factor for --synthetic");
  fit_cmd->add_option("--generations", sysid.generations, "per pass");
  fit_cmd->add_option("--sigma0", sysid.sigma0, "initial step, log units");
  fit_cmd->add_option("--rho", sysid.rho, "second-pass bound factor");
  fit_cmd->add_option("--threads", sysid.threads, "evaluation threads");

  ServeOptions serve;
  CLI::App* serve_cmd = app.add_subcommand("serve", "serve the RL environment");
  AddCommon(serve_cmd, serve.common, false);
  serve_cmd->add_flag("--stdio", serve.stdio, "serve on stdin/stdout");
  serve_cmd->add_option("--port", serve.port, "TCP port on 127.0.0.1");

  PlotOptions plot;
  CLI::App* plot_cmd = app.add_subcommand("plot", "SVG plots from a run");
  AddCommon(plot_cmd, plot.common);
  plot_cmd->add_option("--log", plot.log, "trajectory CSV");
  plot_cmd->add_option("--report", plot.report, "run report JSON");
  plot_cmd->add_option("--discard", plot.discard, "transient jumps dropped");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError("usage", e.what());
    return 2;
  }

  try {
    if (run_cmd->parsed()) return CmdRun(run);
    if (gen_cmd->parsed()) return CmdSysidGenerate(sysid);
    if (replay_cmd->parsed()) return CmdSysidReplay(sysid);
    if (fit_cmd->parsed()) return CmdSysidFit(sysid);
    if (serve_cmd->parsed()) return CmdServe(serve);
    if (plot_cmd->parsed()) return CmdPlot(plot);
  } catch (const std::exception& e) {
    PrintError(ErrorKind(e), e.what());
    return 1;
  }
  return 1;
}
