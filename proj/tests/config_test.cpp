// Copyright 2026 The GLR Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sstream>

#include <gtest/gtest.h>

#include "glr/config.hpp"
#include "glr/snapshot_json.hpp"

namespace glr {
namespace {

KeyValueFile parse(const std::string& text) {
  std::istringstream in(text);
  return KeyValueFile::parse(in);
}

TEST(KeyValueFile, ParsesCommentsAndWhitespace) {
  const auto kv = parse("# header\n  num_planes = 24  # trailing\n\nbeta=1e-3\n");
  EXPECT_EQ(kv.values().size(), 2u);
  int planes = 0;
  double beta = 0;
  kv.get("num_planes", planes);
  kv.get("beta", beta);
  EXPECT_EQ(planes, 24);
  EXPECT_DOUBLE_EQ(beta, 1e-3);
}

TEST(KeyValueFile, MissingKeyLeavesDefault) {
  int x = 7;
  parse("").get("x", x);
  EXPECT_EQ(x, 7);
}

TEST(KeyValueFile, Lists) {
  const auto kv = parse("p_sweep = 0, 0.02 ,0.04\nalgorithms = GLR,TBR\n");
  std::vector<double> p;
  std::vector<std::string> a;
  kv.get_list("p_sweep", p);
  kv.get_list("algorithms", a);
  EXPECT_EQ(p, (std::vector<double>{0.0, 0.02, 0.04}));
  EXPECT_EQ(a, (std::vector<std::string>{"GLR", "TBR"}));
}

TEST(KeyValueFile, Errors) {
  EXPECT_THROW(parse("no equals sign\n"), ConfigError);
  EXPECT_THROW(parse(" = 3\n"), ConfigError);
  int x = 0;
  EXPECT_THROW(parse("x = 3.5\n").get("x", x), ConfigError);
  EXPECT_THROW(parse("x = abc\n").get("x", x), ConfigError);
  std::vector<int> v;
  EXPECT_THROW(parse("x = 1, b\n").get_list("x", v), ConfigError);
  EXPECT_THROW(KeyValueFile::load("/nonexistent/file.conf"), ConfigError);
}

TEST(RunConfig, DefaultsMatchReferenceConstellation) {
  RunConfig rc;
  rc.validate();
  EXPECT_EQ(rc.constellation.size(), 132);
  EXPECT_DOUBLE_EQ(rc.constellation.altitude_km, 1050.0);
  EXPECT_DOUBLE_EQ(rc.constellation.inclination_deg, 53.0);
  EXPECT_DOUBLE_EQ(rc.constellation.comm_range_km, 3500.0);
  EXPECT_DOUBLE_EQ(rc.elevation_mask_deg, 50.4);
}

TEST(RunConfig, ApplyOverridesAndSeed) {
  RunConfig rc;
  rc.apply(parse("num_planes = 24\nisl_policy = range-graph\nseed = 42\noptimizer = sgd\n"
                 "plane_sweep = 12, 24, 36\n"));
  EXPECT_EQ(rc.constellation.num_planes, 24);
  EXPECT_EQ(rc.policy, IslPolicy::kRangeGraph);
  EXPECT_EQ(rc.seed, 42u);
  EXPECT_EQ(rc.hyper.seed, 42u);
  EXPECT_EQ(rc.hyper.optimizer, Optimizer::kSgd);
  EXPECT_EQ(rc.plane_sweep, (std::vector<int>{12, 24, 36}));
  const auto e = rc.experiment(0.02, 36);
  EXPECT_EQ(e.constellation.num_planes, 36);
  EXPECT_DOUBLE_EQ(e.interruption_prob, 0.02);
  EXPECT_EQ(e.algorithms.size(), 4u);
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  RunConfig rc;
  EXPECT_THROW(rc.apply(parse("num_plane = 3\n")), ConfigError);
  EXPECT_THROW(rc.apply(parse("optimizer = rmsprop\n")), ConfigError);
  EXPECT_THROW(rc.apply(parse("isl_policy = mesh\n")), ConfigError);
  RunConfig bad;
  bad.snapshot_count = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.constellation.altitude_km = -5;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.algorithms = {"OSPF"};
  EXPECT_THROW(bad.experiment(0.0, 12), ConfigError);
}

TEST(RunConfig, JsonEmbedsEveryKnownKey) {
  RunConfig rc;
  const auto j = rc.to_json();
  for (const auto& k : RunConfig::known_keys()) {
    const bool top = j.contains(k);
    const bool nested = j["constellation"].contains(k);
    EXPECT_TRUE(top || nested || k == "max_elevation_deg") << k;
  }
}

TEST(SnapshotJson, RoundTrip) {
  ConstellationConfig c;
  c.num_planes = 4;
  c.sats_per_plane = 5;
  const auto s = snapshot_at(c, 120.0, IslPolicy::kRangeGraph);
  const auto back = snapshot_from_json(snapshot_to_json(s));
  EXPECT_EQ(back.node_count, s.node_count);
  EXPECT_DOUBLE_EQ(back.time, s.time);
  EXPECT_EQ(back.policy, IslPolicy::kRangeGraph);
  ASSERT_EQ(back.links.size(), s.links.size());
  for (std::size_t k = 0; k < s.links.size(); ++k) {
    EXPECT_EQ(back.links[k].a, s.links[k].a);
    EXPECT_EQ(back.links[k].b, s.links[k].b);
    EXPECT_DOUBLE_EQ(back.links[k].delay_s, s.links[k].delay_s);
  }
  ASSERT_EQ(back.positions.size(), s.positions.size());
  EXPECT_DOUBLE_EQ(back.positions[3].x(), s.positions[3].x());
}

}  // namespace
}  // namespace glr
