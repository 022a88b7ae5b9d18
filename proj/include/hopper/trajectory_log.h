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

#ifndef HOPPER_TRAJECTORY_LOG_H_
#define HOPPER_TRAJECTORY_LOG_H_

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hopper {

// One row of the canonical recorded-data format:
//   t,q0,q1,q2,qd0,qd1,qd2,tau1,tau2,foot_x,foot_y,contact,f_n
struct LogSample {
  double t = 0.0;
  Eigen::Vector3d q = Eigen::Vector3d::Zero();
  Eigen::Vector3d qd = Eigen::Vector3d::Zero();
  Eigen::Vector2d tau = Eigen::Vector2d::Zero();
  Eigen::Vector2d foot = Eigen::Vector2d::Zero();
  bool contact = false;
  double f_n = 0.0;

  bool operator==(const LogSample&) const = default;
};

using TrajectoryLog = std::vector<LogSample>;

inline constexpr const char* kLogHeader =
    "t,q0,q1,q2,qd0,qd1,qd2,tau1,tau2,foot_x,foot_y,contact,f_n";

// Floats are written with 17 significant digits so a read-back is exact.
void WriteLogCsv(std::ostream& out, const TrajectoryLog& log);
void WriteLogCsv(const std::string& path, const TrajectoryLog& log);

// Throws Error with the offending line number on malformed input.
TrajectoryLog ReadLogCsv(std::istream& in);
TrajectoryLog ReadLogCsv(const std::string& path);

}  // namespace hopper

#endif  // HOPPER_TRAJECTORY_LOG_H_
