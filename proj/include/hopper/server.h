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

#ifndef HOPPER_SERVER_H_
#define HOPPER_SERVER_H_

#include <atomic>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>

#include "hopper/rlenv.h"

namespace hopper {

// Newline-delimited JSON protocol, one request and one reply per line.
//
//   {"cmd":"spec"}
//     -> {"type":"spec","obs_dim":15,"act_dim":2,"commands":[...],
//         "control_rate":200,"episode_steps":2000,"obs_layout":[...]}
//   {"cmd":"reset","seed":N,"height":H}          (height optional)
//     -> {"type":"reset","observation":[...],"height":H}
//   {"cmd":"step","action":[a1,a2]}
//     -> {"type":"step","observation":[...],
//         "reward":{"g_e":..,"p_h":..,"p_j":..,"p_jp":..,"p_jv":..,"total":..},
//         "terminated":false,
//         "info":{"base_height":..,"contact":..,"t":..,"step":..}}
//   anything else
//     -> {"type":"error","code":"parse"|"request"|"protocol","message":".."}
//
// Reals are written with 17 significant digits.

std::string FormatReal(double value);
std::string SpecReply(const EnvConfig& config);
std::string ResetReply(const Observation& obs, double height);
std::string StepReply(const EnvStep& step);
std::string ErrorReply(const std::string& code, const std::string& message);

// One connection's episode owner. Handle never throws; failures become error
// replies and the session stays usable.
class Session {
 public:
  explicit Session(std::unique_ptr<HopperEnv> env);

  std::string Handle(const std::string& line);

 private:
  std::unique_ptr<HopperEnv> env_;
};

using EnvFactory = std::function<std::unique_ptr<HopperEnv>()>;

// Serves one session until end of input or until `stop` is set.
void ServeStream(std::istream& in, std::ostream& out, const EnvFactory& make,
                 const std::atomic<bool>* stop = nullptr);

// TCP listener on 127.0.0.1, one thread and one session per connection.
class TcpServer {
 public:
  explicit TcpServer(EnvFactory make);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  // Returns the bound port (useful with port 0). Throws Error when the port
  // is unavailable.
  int Bind(int port);
  // Blocks until Stop(); joins connection threads before returning.
  void Run();
  void Stop() { stop_ = true; }

 private:
  EnvFactory make_;
  int listen_fd_ = -1;
  std::atomic<bool> stop_{false};
};

}  // namespace hopper

#endif  // HOPPER_SERVER_H_
