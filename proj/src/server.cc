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

#include "hopper/server.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "hopper/errors.h"

namespace hopper {
namespace {

using nlohmann::json;

std::string Quote(const std::string& s) { return json(s).dump(); }

template <typename Range>
std::string RealArray(const Range& values) {
  std::string out = "[";
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += FormatReal(v);
    first = false;
  }
  return out + "]";
}

std::string ObservationField(const Observation& obs) {
  return "\"observation\":" + RealArray(obs);
}

}  // namespace

std::string FormatReal(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string SpecReply(const EnvConfig& config) {
  std::string layout = "[";
  const auto names = ObservationLayout();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) layout += ',';
    layout += Quote(names[i]);
  }
  layout += "]";
  return "{\"type\":\"spec\",\"obs_dim\":" + std::to_string(kObsDim) +
         ",\"act_dim\":" + std::to_string(kActDim) +
         ",\"commands\":" + RealArray(config.commands) +
         ",\"control_rate\":" + FormatReal(config.control_rate) +
         ",\"episode_steps\":" + std::to_string(config.EpisodeSteps()) +
         ",\"obs_layout\":" + layout + "}";
}

std::string ResetReply(const Observation& obs, double height) {
  return "{\"type\":\"reset\"," + ObservationField(obs) +
         ",\"height\":" + FormatReal(height) + "}";
}

std::string StepReply(const EnvStep& step) {
  const RewardBreakdown& r = step.reward;
  std::string out = "{\"type\":\"step\"," + ObservationField(step.observation);
  out += ",\"reward\":{\"g_e\":" + FormatReal(r.g_e) +
         ",\"p_h\":" + FormatReal(r.p_h) + ",\"p_j\":" + FormatReal(r.p_j) +
         ",\"p_jp\":" + FormatReal(r.p_jp) +
         ",\"p_jv\":" + FormatReal(r.p_jv) +
         ",\"total\":" + FormatReal(r.total) + "}";
  out += ",\"terminated\":";
  out += step.terminated ? "true" : "false";
  out += ",\"info\":{\"base_height\":" + FormatReal(step.info.base_height) +
         ",\"contact\":" + (step.info.contact ? "true" : "false") +
         ",\"t\":" + FormatReal(step.info.t) +
         ",\"step\":" + std::to_string(step.info.step);
  if (!step.info.error.empty()) out += ",\"error\":" + Quote(step.info.error);
  return out + "}}";
}

std::string ErrorReply(const std::string& code, const std::string& message) {
  return "{\"type\":\"error\",\"code\":" + Quote(code) +
         ",\"message\":" + Quote(message) + "}";
}

Session::Session(std::unique_ptr<HopperEnv> env) : env_(std::move(env)) {}

std::string Session::Handle(const std::string& line) {
  json request;
  try {
    request = json::parse(line);
  } catch (const json::parse_error& e) {
    return ErrorReply("parse", e.what());
  }
  if (!request.is_object() || !request.contains("cmd") ||
      !request["cmd"].is_string()) {
    return ErrorReply("request", "expected an object with a string 'cmd'");
  }
  const std::string cmd = request["cmd"];
  try {
    if (cmd == "spec") return SpecReply(env_->config());
    if (cmd == "reset") {
      const auto& seed = request.value("seed", json(0));
      if (!seed.is_number_unsigned() &&
          !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
        return ErrorReply("request", "'seed' must be a non-negative integer");
      }
      std::optional<double> height;
      if (request.contains("height") && !request["height"].is_null()) {
        if (!request["height"].is_number()) {
          return ErrorReply("request", "'height' must be a number");
        }
        height = request["height"].get<double>();
      }
      const Observation obs = env_->Reset(seed.get<std::uint64_t>(), height);
      return ResetReply(obs, env_->command());
    }
    if (cmd == "step") {
      const auto it = request.find("action");
      if (it == request.end() || !it->is_array() || it->size() != kActDim ||
          !(*it)[0].is_number() || !(*it)[1].is_number()) {
        return ErrorReply("request", "'action' must be an array of 2 numbers");
      }
      const Eigen::Vector2d action((*it)[0].get<double>(),
                                   (*it)[1].get<double>());
      return StepReply(env_->Step(action));
    }
    return ErrorReply("request", "unknown cmd '" + cmd + "'");
  } catch (const ProtocolError& e) {
    return ErrorReply("protocol", e.what());
  } catch (const std::exception& e) {
    return ErrorReply("request", e.what());
  }
}

void ServeStream(std::istream& in, std::ostream& out, const EnvFactory& make,
                 const std::atomic<bool>* stop) {
  Session session(make());
  std::string line;
  while ((stop == nullptr || !stop->load()) && std::getline(in, line)) {
    if (line.empty()) continue;
    out << session.Handle(line) << '\n';
    out.flush();
  }
}

namespace {

bool SendAll(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n =
        ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

void ServeConnection(int fd, const EnvFactory& make,
                     const std::atomic<bool>& stop) {
  Session session(make());
  std::string buffer;
  char chunk[4096];
  while (!stop) {
    pollfd p{fd, POLLIN, 0};
    const int ready = ::poll(&p, 1, 100);
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t pos;
    bool ok = true;
    while ((pos = buffer.find('\n')) != std::string::npos) {
      const std::string line = buffer.substr(0, pos);
      buffer.erase(0, pos + 1);
      if (line.empty()) continue;
      if (!SendAll(fd, session.Handle(line) + "\n")) {
        ok = false;
        break;
      }
    }
    if (!ok) break;
  }
  ::close(fd);
}

}  // namespace

TcpServer::TcpServer(EnvFactory make) : make_(std::move(make)) {}

TcpServer::~TcpServer() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

int TcpServer::Bind(int port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(std::string("socket: ") + std::strerror(errno));
  const int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) <
          0 ||
      ::listen(listen_fd_, 8) < 0) {
    const std::string reason = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw Error("cannot listen on port " + std::to_string(port) + ": " +
                reason);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

void TcpServer::Run() {
  if (listen_fd_ < 0) throw Error("server is not bound");
  std::vector<std::thread> workers;
  while (!stop_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, 100);
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    workers.emplace_back(ServeConnection, fd, std::cref(make_),
                         std::cref(stop_));
  }
  for (auto& w : workers) w.join();
}

}  // namespace hopper
