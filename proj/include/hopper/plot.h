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

#ifndef HOPPER_PLOT_H_
#define HOPPER_PLOT_H_

#include <string>
#include <vector>

#include "hopper/trajectory_log.h"
#include "hopper/trial.h"

namespace hopper {

// Static SVG figures. Output depends only on the inputs, so the same CSV
// always yields the same bytes.

// Base height over time with detected apexes marked. When `schedule` is not
// empty the commanded height is drawn as a step line.
std::string HeightTraceSvg(const TrajectoryLog& log,
                           const std::vector<JumpRecord>& jumps,
                           const CommandSchedule& schedule);

// One box (quartiles, whiskers to min/max, median line) per command with the
// individual apexes overlaid.
std::string ApexDistributionSvg(const std::vector<JumpRecord>& jumps,
                                int discard = 0);

// Reads the jumps and command schedule back from a run report.
void ReadReportJson(const std::string& path, std::vector<JumpRecord>& jumps,
                    CommandSchedule& schedule);

void WriteText(const std::string& path, const std::string& text);

}  // namespace hopper

#endif  // HOPPER_PLOT_H_
