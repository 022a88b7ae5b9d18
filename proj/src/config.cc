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

#include "hopper/config.h"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hopper/errors.h"

namespace hopper {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct Binding {
  std::function<void(HopperConfig&, const json&)> set;
  std::function<ordered_json(const HopperConfig&)> get;
};

double AsReal(const std::string& key, const json& v) {
  if (!v.is_number()) throw ConfigError(key, "expected a number");
  return v.get<double>();
}

int AsInt(const std::string& key, const json& v) {
  if (!v.is_number_integer()) throw ConfigError(key, "expected an integer");
  return v.get<int>();
}

Eigen::Vector2d AsPair(const std::string& key, const json& v) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
      !v[1].is_number()) {
    throw ConfigError(key, "expected an array of 2 numbers");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<double> AsReals(const std::string& key, const json& v) {
  if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) out.push_back(AsReal(key, e));
  return out;
}

template <typename Section>
Binding Real(Section HopperConfig::*section, double Section::*field,
             const std::string& key) {
  return {[=](HopperConfig& c, const json& v) {
            (c.*section).*field = AsReal(key, v);
          },
          [=](const HopperConfig& c) {
            return ordered_json((c.*section).*field);
          }};
}

template <typename Section>
Binding Int(Section HopperConfig::*section, int Section::*field,
            const std::string& key) {
  return {[=](HopperConfig& c, const json& v) {
            (c.*section).*field = AsInt(key, v);
          },
          [=](const HopperConfig& c) {
            return ordered_json((c.*section).*field);
          }};
}

template <typename Section>
Binding Pair(Section HopperConfig::*section, Eigen::Vector2d Section::*field,
             const std::string& key) {
  return {[=](HopperConfig& c, const json& v) {
            (c.*section).*field = AsPair(key, v);
          },
          [=](const HopperConfig& c) {
            const Eigen::Vector2d& p = (c.*section).*field;
            return ordered_json::array({p[0], p[1]});
          }};
}

// Ordered so that model keys come first.
const std::vector<std::pair<std::string, Binding>>& Bindings() {
  static const auto* kBindings = [] {
    auto* b = new std::vector<std::pair<std::string, Binding>>;
    auto add = [&](const std::string& key, Binding binding) {
      b->emplace_back(key, std::move(binding));
    };
    using C = HopperConfig;
    add("model.l1", Real(&C::model, &RobotModel::l1, "model.l1"));
    add("model.l2", Real(&C::model, &RobotModel::l2, "model.l2"));
    add("model.m_base", Real(&C::model, &RobotModel::m_base, "model.m_base"));
    add("model.m1", Real(&C::model, &RobotModel::m1, "model.m1"));
    add("model.m2", Real(&C::model, &RobotModel::m2, "model.m2"));
    add("model.com1", Real(&C::model, &RobotModel::com1, "model.com1"));
    add("model.com2", Real(&C::model, &RobotModel::com2, "model.com2"));
    add("model.iz1", Real(&C::model, &RobotModel::iz1, "model.iz1"));
    add("model.iz2", Real(&C::model, &RobotModel::iz2, "model.iz2"));
    add("model.m_total",
        Real(&C::model, &RobotModel::m_total, "model.m_total"));
    add("model.q_low", Pair(&C::model, &RobotModel::q_low, "model.q_low"));
    add("model.q_high", Pair(&C::model, &RobotModel::q_high, "model.q_high"));
    add("model.qd_max", Pair(&C::model, &RobotModel::qd_max, "model.qd_max"));
    add("model.tau_max",
        Real(&C::model, &RobotModel::tau_max, "model.tau_max"));
    add("model.belt_ratio",
        Real(&C::model, &RobotModel::belt_ratio, "model.belt_ratio"));
    add("model.gravity",
        Real(&C::model, &RobotModel::gravity, "model.gravity"));
    add("model.ground_height",
        Real(&C::model, &RobotModel::ground_height, "model.ground_height"));

    for (const auto& name : IdentifiableParamNames()) {
      const std::string key = "sim." + name;
      add(key, {[=](C& c, const json& v) {
                  SetParam(c.sim, name, AsReal(key, v));
                },
                [=](const C& c) {
                  return ordered_json(GetParam(c.sim, name));
                }});
    }
    add("sim.friction_velocity_eps",
        Real(&C::sim, &SimParams::friction_velocity_eps,
             "sim.friction_velocity_eps"));
    add("sim.tangential_damping",
        Real(&C::sim, &SimParams::tangential_damping,
             "sim.tangential_damping"));

    add("es.kp_y", Real(&C::es, &EsGains::kp_y, "es.kp_y"));
    add("es.kd_y", Real(&C::es, &EsGains::kd_y, "es.kd_y"));
    add("es.flight_pose", Pair(&C::es, &EsGains::flight_pose, "es.flight_pose"));
    add("es.flight_kp", Real(&C::es, &EsGains::flight_kp, "es.flight_kp"));
    add("es.flight_kd", Real(&C::es, &EsGains::flight_kd, "es.flight_kd"));
    add("es.touchdown_kp",
        Real(&C::es, &EsGains::touchdown_kp, "es.touchdown_kp"));
    add("es.touchdown_kd",
        Real(&C::es, &EsGains::touchdown_kd, "es.touchdown_kd"));
    add("es.standing_extension",
        Real(&C::es, &EsGains::standing_extension, "es.standing_extension"));
    add("es.contact_threshold",
        Real(&C::es, &EsGains::contact_threshold, "es.contact_threshold"));
    add("es.initial_gain",
        Real(&C::es, &EsGains::initial_gain, "es.initial_gain"));
    add("es.min_stroke", Real(&C::es, &EsGains::min_stroke, "es.min_stroke"));
    add("es.apex_feedback",
        {[](C& c, const json& v) {
           if (v == "measured") {
             c.es.apex_feedback = ApexFeedback::kMeasured;
           } else if (v == "ballistic") {
             c.es.apex_feedback = ApexFeedback::kBallistic;
           } else {
             throw ConfigError("es.apex_feedback",
                               "expected \"measured\" or \"ballistic\"");
           }
         },
         [](const C& c) {
           return ordered_json(c.es.apex_feedback == ApexFeedback::kMeasured
                                   ? "measured"
                                   : "ballistic");
         }});

    add("env.commands",
        {[](C& c, const json& v) {
           c.env.commands = AsReals("env.commands", v);
         },
         [](const C& c) { return ordered_json(c.env.commands); }});
    add("env.episode_length",
        Real(&C::env, &EnvConfig::episode_length, "env.episode_length"));
    add("env.control_rate",
        Real(&C::env, &EnvConfig::control_rate, "env.control_rate"));
    add("env.physics_substeps",
        Int(&C::env, &EnvConfig::physics_substeps, "env.physics_substeps"));
    add("env.delay_prob",
        Real(&C::env, &EnvConfig::delay_prob, "env.delay_prob"));
    add("env.buffer_length",
        Int(&C::env, &EnvConfig::buffer_length, "env.buffer_length"));
    add("env.noise_joint",
        Real(&C::env, &EnvConfig::noise_joint, "env.noise_joint"));
    add("env.noise_torque",
        Real(&C::env, &EnvConfig::noise_torque, "env.noise_torque"));
    add("env.height_scale",
        Real(&C::env, &EnvConfig::height_scale, "env.height_scale"));
    add("env.standing_extension",
        Real(&C::env, &EnvConfig::standing_extension,
             "env.standing_extension"));
    add("env.safety_kp", Real(&C::env, &EnvConfig::safety_kp, "env.safety_kp"));
    add("env.safety_kd", Real(&C::env, &EnvConfig::safety_kd, "env.safety_kd"));
    add("env.reward_weights",
        {[](C& c, const json& v) {
           const auto w = AsReals("env.reward_weights", v);
           if (w.size() != 5) {
             throw ConfigError("env.reward_weights", "expected 5 numbers");
           }
           c.env.weights = {w[0], w[1], w[2], w[3], w[4]};
         },
         [](const C& c) {
           const RewardWeights& w = c.env.weights;
           return ordered_json::array({w.energy, w.height, w.jerk,
                                       w.joint_position, w.joint_velocity});
         }});

    add("sysid.replay_kp",
        Pair(&C::replay, &ReplaySettings::kp, "sysid.replay_kp"));
    add("sysid.replay_kd",
        Pair(&C::replay, &ReplaySettings::kd, "sysid.replay_kd"));
    add("sysid.control_rate",
        Real(&C::replay, &ReplaySettings::control_rate, "sysid.control_rate"));
    add("sysid.physics_substeps",
        Int(&C::replay, &ReplaySettings::physics_substeps,
            "sysid.physics_substeps"));
    add("sysid.fixed_base_clearance",
        Real(&C::replay, &ReplaySettings::fixed_base_clearance,
             "sysid.fixed_base_clearance"));
    return b;
  }();
  return *kBindings;
}

}  // namespace

HopperConfig DefaultConfig() {
  HopperConfig c;
  c.sim = ParamsWithModelInertia(c.sim, c.model);
  c.es = DefaultEsGains(c.model);
  return c;
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys;
  for (const auto& [key, binding] : Bindings()) keys.push_back(key);
  return keys;
}

HopperConfig ParseConfig(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("<document>", "expected a flat JSON object");
  }
  std::map<std::string, const Binding*> table;
  for (const auto& [key, binding] : Bindings()) table[key] = &binding;
  for (const auto& [key, value] : doc.items()) {
    if (!table.count(key)) throw ConfigError(key, "unknown key");
  }

  HopperConfig c;
  auto apply = [&](const std::string& prefix) {
    for (const auto& [key, binding] : Bindings()) {
      if (key.rfind(prefix, 0) == 0 && doc.contains(key)) {
        binding.set(c, doc[key]);
      }
    }
  };
  apply("model.");
  Validate(c.model);
  // Derived defaults follow the model.
  c.sim = ParamsWithModelInertia(c.sim, c.model);
  c.es = DefaultEsGains(c.model);
  apply("sim.");
  apply("es.");
  apply("env.");
  apply("sysid.");
  Validate(c.sim);
  Validate(c.env);
  if (c.es.kp_y < 0) throw ConfigError("es.kp_y", "must be >= 0");
  if (c.es.kd_y < 0) throw ConfigError("es.kd_y", "must be >= 0");
  if (!(c.es.initial_gain > 0)) {
    throw ConfigError("es.initial_gain", "must be > 0");
  }
  return c;
}

HopperConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string DumpConfig(const HopperConfig& config) {
  ordered_json doc;
  for (const auto& [key, binding] : Bindings()) doc[key] = binding.get(config);
  return doc.dump(2) + "\n";
}

void SaveConfig(const std::string& path, const HopperConfig& config) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << DumpConfig(config);
}

}  // namespace hopper
