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

#include "hopper/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hopper/errors.h"
#include "hopper/stats.h"

namespace hopper {
namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 50.0;

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Linear map from a data range onto the plot box.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double px_lo = 0.0;
  double px_hi = 1.0;
  double operator()(double v) const {
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

void Pad(double& lo, double& hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double margin = 0.05 * (hi - lo);
  lo -= margin;
  hi += margin;
}

std::string Header(const std::string& title) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Num(kWidth)
    << "\" height=\"" << Num(kHeight) << "\" viewBox=\"0 0 " << Num(kWidth)
    << ' ' << Num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << Num(kWidth / 2) << "\" y=\"18\" text-anchor=\"middle\">"
    << title << "</text>\n";
  return s.str();
}

std::string Frame(const Axis& x, const Axis& y, const std::string& x_label,
                  const std::string& y_label, bool x_ticks) {
  std::ostringstream s;
  s << "<rect x=\"" << Num(kLeft) << "\" y=\"" << Num(kTop) << "\" width=\""
    << Num(kWidth - kLeft - kRight) << "\" height=\""
    << Num(kHeight - kTop - kBottom)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = y.lo + (y.hi - y.lo) * i / 5.0;
    s << "<text x=\"" << Num(kLeft - 6) << "\" y=\"" << Num(y(v) + 4)
      << "\" text-anchor=\"end\">" << Label(v) << "</text>\n";
  }
  if (x_ticks) {
    for (int i = 0; i <= 5; ++i) {
      const double v = x.lo + (x.hi - x.lo) * i / 5.0;
      s << "<text x=\"" << Num(x(v)) << "\" y=\""
        << Num(kHeight - kBottom + 16) << "\" text-anchor=\"middle\">"
        << Label(v) << "</text>\n";
    }
  }
  s << "<text x=\"" << Num(kWidth / 2) << "\" y=\"" << Num(kHeight - 10)
    << "\" text-anchor=\"middle\">" << x_label << "</text>\n"
    << "<text x=\"16\" y=\"" << Num(kHeight / 2)
    << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << Num(kHeight / 2) << ")\">" << y_label << "</text>\n";
  return s.str();
}

}  // namespace

std::string HeightTraceSvg(const TrajectoryLog& log,
                           const std::vector<JumpRecord>& jumps,
                           const CommandSchedule& schedule) {
  if (log.empty()) throw Error("cannot plot an empty log");
  double y_lo = log.front().q[0];
  double y_hi = y_lo;
  for (const auto& s : log) {
    y_lo = std::min(y_lo, s.q[0]);
    y_hi = std::max(y_hi, s.q[0]);
  }
  for (const auto& seg : schedule) {
    y_lo = std::min(y_lo, seg.height);
    y_hi = std::max(y_hi, seg.height);
  }
  double t_lo = log.front().t;
  double t_hi = log.back().t;
  if (!(t_hi > t_lo)) t_hi = t_lo + 1.0;
  Pad(y_lo, y_hi);
  const Axis x{t_lo, t_hi, kLeft, kWidth - kRight};
  const Axis y{y_lo, y_hi, kHeight - kBottom, kTop};

  std::ostringstream s;
  s << Header("Base height") << Frame(x, y, "time [s]", "base height [m]", true);
  s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (i) s << ' ';
    s << Num(x(log[i].t)) << ',' << Num(y(log[i].q[0]));
  }
  s << "\"/>\n";
  if (!schedule.empty()) {
    s << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-dasharray=\"4 3\" "
         "points=\"";
    for (std::size_t i = 0; i < schedule.size(); ++i) {
      const double start = std::max(schedule[i].start, t_lo);
      const double end =
          i + 1 < schedule.size() ? schedule[i + 1].start : t_hi;
      if (i) s << ' ';
      s << Num(x(start)) << ',' << Num(y(schedule[i].height)) << ' '
        << Num(x(std::min(end, t_hi))) << ',' << Num(y(schedule[i].height));
    }
    s << "\"/>\n";
  }
  for (const auto& j : jumps) {
    s << "<circle cx=\"" << Num(x(j.t_apex)) << "\" cy=\"" << Num(y(j.apex))
      << "\" r=\"2.5\" fill=\"#ff7f0e\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string ApexDistributionSvg(const std::vector<JumpRecord>& jumps,
                                int discard) {
  const std::vector<CommandSummary> summary = Summarize(jumps, discard);
  std::vector<std::pair<double, std::vector<double>>> groups;
  double y_lo = 0.0;
  double y_hi = 0.0;
  bool first = true;
  for (const auto& c : summary) {
    std::vector<double> a = ApexesFor(jumps, c.command, discard);
    for (double v : a) {
      y_lo = first ? v : std::min(y_lo, v);
      y_hi = first ? v : std::max(y_hi, v);
      first = false;
    }
    if (c.command > 0.0) {
      y_lo = first ? c.command : std::min(y_lo, c.command);
      y_hi = first ? c.command : std::max(y_hi, c.command);
      first = false;
    }
    groups.emplace_back(c.command, std::move(a));
  }
  Pad(y_lo, y_hi);
  const double n = std::max<double>(1.0, groups.size());
  const Axis x{0.0, n, kLeft, kWidth - kRight};
  const Axis y{y_lo, y_hi, kHeight - kBottom, kTop};

  std::ostringstream s;
  s << Header("Jump height distribution")
    << Frame(x, y, "commanded height [m]", "apex [m]", false);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double cx = x(g + 0.5);
    const double half = 0.25 * (x(1.0) - x(0.0));
    const auto& [command, a] = groups[g];
    s << "<text x=\"" << Num(cx) << "\" y=\"" << Num(kHeight - kBottom + 16)
      << "\" text-anchor=\"middle\">" << Label(command) << " (n=" << a.size()
      << ")</text>\n";
    if (command > 0.0) {
      s << "<line x1=\"" << Num(cx - 1.4 * half) << "\" y1=\""
        << Num(y(command)) << "\" x2=\"" << Num(cx + 1.4 * half) << "\" y2=\""
        << Num(y(command))
        << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
    }
    if (a.empty()) continue;
    const double q1 = Quantile(a, 0.25);
    const double q2 = Quantile(a, 0.5);
    const double q3 = Quantile(a, 0.75);
    const double lo = *std::min_element(a.begin(), a.end());
    const double hi = *std::max_element(a.begin(), a.end());
    s << "<line x1=\"" << Num(cx) << "\" y1=\"" << Num(y(lo)) << "\" x2=\""
      << Num(cx) << "\" y2=\"" << Num(y(hi)) << "\" stroke=\"black\"/>\n";
    s << "<rect x=\"" << Num(cx - half) << "\" y=\"" << Num(y(q3))
      << "\" width=\"" << Num(2 * half) << "\" height=\""
      << Num(std::max(0.5, y(q1) - y(q3)))
      << "\" fill=\"#aec7e8\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << Num(cx - half) << "\" y1=\"" << Num(y(q2))
      << "\" x2=\"" << Num(cx + half) << "\" y2=\"" << Num(y(q2))
      << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
      // Deterministic horizontal spread.
      const double jitter = half * 0.6 * (((i * 7) % 11) / 5.0 - 1.0);
      s << "<circle cx=\"" << Num(cx + jitter) << "\" cy=\"" << Num(y(a[i]))
        << "\" r=\"2\" fill=\"#1f77b4\" fill-opacity=\"0.6\"/>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

void ReadReportJson(const std::string& path, std::vector<JumpRecord>& jumps,
                    CommandSchedule& schedule) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
    jumps.clear();
    for (const auto& j : doc.at("jumps")) {
      JumpRecord r;
      r.t_liftoff = j.at("t_liftoff");
      r.t_apex = j.at("t_apex");
      r.t_touchdown = j.at("t_touchdown");
      r.apex = j.at("apex");
      r.command = j.at("command");
      jumps.push_back(r);
    }
    schedule.clear();
    if (doc.contains("schedule")) {
      for (const auto& seg : doc["schedule"]) {
        schedule.push_back({seg.at("start"), seg.at("height")});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad report " + path + ": " + e.what());
  }
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

}  // namespace hopper
