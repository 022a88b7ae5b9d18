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

#ifndef HOPPER_CONFIG_H_
#define HOPPER_CONFIG_H_

#include <string>
#include <vector>

#include "hopper/control.h"
#include "hopper/model.h"
#include "hopper/rlenv.h"
#include "hopper/sim.h"
#include "hopper/sysid.h"

namespace hopper {

// Everything a command reads from a config file. Files are flat JSON
// objects, e.g. {"model.l1": 0.2, "sim.rail_damping": 1.07,
// "es.flight_pose": [-0.72, 1.45]}. Keys are listed by ConfigKeys().
struct HopperConfig {
  RobotModel model;
  SimParams sim;
  EsGains es;
  EnvConfig env;
  ReplaySettings replay;
};

// Defaults with the flight pose and link inertias derived from the model.
HopperConfig DefaultConfig();

std::vector<std::string> ConfigKeys();

// Applies the keys in `text` on top of the defaults. Model keys are applied
// first, so derived defaults follow a changed model unless set explicitly.
// Throws ConfigError naming the offending key (unknown key, wrong type,
// violated invariant).
HopperConfig ParseConfig(const std::string& text);
HopperConfig LoadConfig(const std::string& path);

// Full flat dump with every key.
std::string DumpConfig(const HopperConfig& config);
void SaveConfig(const std::string& path, const HopperConfig& config);

}  // namespace hopper

#endif  // HOPPER_CONFIG_H_
