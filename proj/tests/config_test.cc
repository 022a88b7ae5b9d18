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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "hopper/errors.h"

namespace hopper {
namespace {

std::string KeyOf(const std::string& text) {
  try {
    ParseConfig(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "";
}

TEST(Config, EmptyObjectGivesDefaults) {
  const HopperConfig c = ParseConfig("{}");
  const HopperConfig d = DefaultConfig();
  EXPECT_EQ(DumpConfig(c), DumpConfig(d));
  EXPECT_EQ(c.model.l1, 0.2);
  EXPECT_EQ(c.env.commands, (std::vector<double>{0.25, 0.30, 0.35}));
}

TEST(Config, DumpParsesBackToTheSameDump) {
  HopperConfig c = DefaultConfig();
  c.sim.knee_damping = 0.3;
  c.es.kp_y = 3.5;
  const std::string dump = DumpConfig(c);
  EXPECT_EQ(DumpConfig(ParseConfig(dump)), dump);
}

TEST(Config, DumpListsEveryKey) {
  const auto doc = nlohmann::json::parse(DumpConfig(DefaultConfig()));
  EXPECT_EQ(doc.size(), ConfigKeys().size());
  for (const auto& key : ConfigKeys()) EXPECT_TRUE(doc.contains(key)) << key;
}

TEST(Config, ShippedDefaultFileMatches) {
  std::ifstream in(HOPPER_SOURCE_DIR "/config/default.json");
  ASSERT_TRUE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), DumpConfig(DefaultConfig()));
}

TEST(Config, DerivedDefaultsFollowTheModel) {
  const HopperConfig c =
      ParseConfig(R"({"model.l1": 0.25, "model.iz1": 0.005})");
  const HopperConfig d = DefaultConfig();
  EXPECT_EQ(c.sim.iz1, 0.005);
  EXPECT_NE(c.es.flight_pose, d.es.flight_pose);
  const HopperConfig e =
      ParseConfig(R"({"model.iz1": 0.005, "sim.iz1": 0.001})");
  EXPECT_EQ(e.sim.iz1, 0.001);
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_EQ(KeyOf(R"({"sim.bogus": 1})"), "sim.bogus");
  EXPECT_EQ(KeyOf(R"({"sim.rail_damping": "x"})"), "sim.rail_damping");
  EXPECT_EQ(KeyOf(R"({"model.q_low": [1]})"), "model.q_low");
  EXPECT_EQ(KeyOf(R"({"env.delay_prob": 2})"), "env.delay_prob");
  EXPECT_EQ(KeyOf(R"({"env.physics_substeps": 1.5})"), "env.physics_substeps");
  EXPECT_EQ(KeyOf("[1]"), "<document>");
  EXPECT_EQ(KeyOf("{"), "<document>");
  EXPECT_EQ(KeyOf(R"({"sim.contact_time_constant": -1})"),
            "sim.contact_time_constant");
}

TEST(Config, LoadAndSave) {
  const auto path =
      std::filesystem::temp_directory_path() / "hopper_config_test.json";
  HopperConfig c = DefaultConfig();
  c.es.kp_y = 7.0;
  SaveConfig(path.string(), c);
  EXPECT_EQ(LoadConfig(path.string()).es.kp_y, 7.0);
  EXPECT_THROW(LoadConfig("/nonexistent/hopper.json"), ConfigError);
}

}  // namespace
}  // namespace hopper
