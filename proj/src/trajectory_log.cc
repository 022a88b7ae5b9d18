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

#include "hopper/trajectory_log.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "hopper/errors.h"

namespace hopper {
namespace {

void AppendDouble(std::string& out, double value) {
  char buffer[32];
  const int n = std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  out.append(buffer, n);
}

double ParseField(std::string_view field, int line_number) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw Error("log line " + std::to_string(line_number) +
                ": cannot parse number '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

void WriteLogCsv(std::ostream& out, const TrajectoryLog& log) {
  std::string text = kLogHeader;
  text += '\n';
  for (const LogSample& s : log) {
    const double values[] = {s.t,      s.q[0],   s.q[1],   s.q[2],  s.qd[0],
                             s.qd[1],  s.qd[2],  s.tau[0], s.tau[1],
                             s.foot[0], s.foot[1]};
    for (double v : values) {
      AppendDouble(text, v);
      text += ',';
    }
    text += s.contact ? "1," : "0,";
    AppendDouble(text, s.f_n);
    text += '\n';
  }
  out << text;
}

void WriteLogCsv(const std::string& path, const TrajectoryLog& log) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  WriteLogCsv(out, log);
}

TrajectoryLog ReadLogCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kLogHeader) {
    throw Error("log line 1: expected header '" + std::string(kLogHeader) +
                "'");
  }
  TrajectoryLog log;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    double fields[13];
    int count = 0;
    std::string_view rest(line);
    while (true) {
      const size_t comma = rest.find(',');
      if (count == 13) {
        throw Error("log line " + std::to_string(line_number) +
                    ": too many columns");
      }
      fields[count++] = ParseField(rest.substr(0, comma), line_number);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (count != 13) {
      throw Error("log line " + std::to_string(line_number) + ": expected 13 "
                  "columns, got " + std::to_string(count));
    }
    LogSample s;
    s.t = fields[0];
    s.q = {fields[1], fields[2], fields[3]};
    s.qd = {fields[4], fields[5], fields[6]};
    s.tau = {fields[7], fields[8]};
    s.foot = {fields[9], fields[10]};
    s.contact = fields[11] != 0.0;
    s.f_n = fields[12];
    log.push_back(s);
  }
  return log;
}

TrajectoryLog ReadLogCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return ReadLogCsv(in);
}

}  // namespace hopper
