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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "glr/constellation.hpp"

namespace glr {
namespace {

constexpr double kA = 7421.0;  // 6371 + 1050 km

ConstellationConfig table_one() { return ConstellationConfig{}; }

TEST(BuildWalker, TableOneSizeAndRadius) {
  const auto states = build_walker(table_one());
  ASSERT_EQ(states.size(), 132u);
  for (const auto& s : states) EXPECT_NEAR(s.position.norm(), kA, 1e-6);
}

TEST(BuildWalker, SingleSatelliteSitsOnXAxis) {
  ConstellationConfig c;
  c.num_planes = 1;
  c.sats_per_plane = 1;
  c.inclination_deg = 0.0;
  const auto states = build_walker(c);
  ASSERT_EQ(states.size(), 1u);
  EXPECT_NEAR(states[0].position.x(), kA, 1e-9);
  EXPECT_NEAR(states[0].position.y(), 0.0, 1e-9);
  EXPECT_NEAR(states[0].position.z(), 0.0, 1e-9);
}

TEST(BuildWalker, TwoByTwoMatchesHandRotation) {
  // RAAN {0, 180}, phase F=1: plane 1 slots shifted by 90 degrees.
  ConstellationConfig c;
  c.num_planes = 2;
  c.sats_per_plane = 2;
  c.phase_factor = 1;
  const auto st = build_walker(c);
  const double ci = 4466.069286811351, si = 5926.67412006096;  // a cos53, a sin53
  const Vec3 expected[4] = {{kA, 0, 0}, {-kA, 0, 0}, {0, -ci, si}, {0, ci, -si}};
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR((st[k].position - expected[k]).norm(), 0.0, 1e-6) << "sat " << k;
  }
  EXPECT_EQ(st[3].plane_index, 1);
  EXPECT_EQ(st[3].slot_index, 1);
}

TEST(BuildWalker, RejectsInvalidConfigNamingBound) {
  ConstellationConfig c;
  c.phase_factor = 12;
  try {
    build_walker(c);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("phase_factor"), std::string::npos);
  }
  c = ConstellationConfig{};
  c.num_planes = 0;
  EXPECT_THROW(build_walker(c), ConfigError);
  c = ConstellationConfig{};
  c.altitude_km = 0;
  EXPECT_THROW(build_walker(c), ConfigError);
  c = ConstellationConfig{};
  c.comm_range_km = -1;
  EXPECT_THROW(build_walker(c), ConfigError);
  c = ConstellationConfig{};
  c.eccentricity = 0.1;
  EXPECT_THROW(build_walker(c), ConfigError);
}

TEST(Propagate, PeriodValue) { EXPECT_NEAR(table_one().period(), 6362.1606, 1e-3); }

TEST(Propagate, ZeroAndFullPeriodReturnEpochPositions) {
  const auto c = table_one();
  const auto epoch = build_walker(c);
  for (double t : {0.0, c.period(), 3.0 * c.period()}) {
    const auto moved = propagate(epoch, c, t);
    for (std::size_t k = 0; k < epoch.size(); ++k) {
      EXPECT_NEAR((moved[k].position - epoch[k].position).norm(), 0.0, 1e-6);
    }
  }
}

TEST(Propagate, HalfPeriodIsAntipodal) {
  const auto c = table_one();
  const auto epoch = build_walker(c);
  const auto moved = propagate(epoch, c, c.period() / 2);
  for (std::size_t k = 0; k < epoch.size(); ++k) {
    EXPECT_NEAR((moved[k].position + epoch[k].position).norm(), 0.0, 1e-6);
  }
}

TEST(Propagate, PreservesRadiusAtArbitraryTimes) {
  const auto c = table_one();
  const auto epoch = build_walker(c);
  for (double t : {1.0, 59.9, 1234.5, 99999.0}) {
    for (const auto& s : propagate(epoch, c, t)) EXPECT_NEAR(s.position.norm(), kA, 1e-6);
  }
  EXPECT_THROW(propagate(epoch, c, -1.0), ArgumentError);
}

TEST(Distance, ChordAndDiameter) {
  const auto st = build_walker(table_one());
  EXPECT_DOUBLE_EQ(inter_sat_distance(st[0], st[0]), 0.0);
  EXPECT_NEAR(inter_sat_distance(st[0], st[1]), 4181.474608640499, 1e-6);
  ConstellationConfig c;
  c.num_planes = 1;
  c.sats_per_plane = 2;
  const auto two = build_walker(c);
  EXPECT_NEAR(inter_sat_distance(two[0], two[1]), 2 * kA, 1e-6);
}

TEST(LineOfSight, Cases) {
  const Vec3 p(kA, 0, 0);
  EXPECT_TRUE(line_of_sight(p, p, 6371.0));
  EXPECT_FALSE(line_of_sight(p, Vec3(-kA, 0, 0), 6371.0));
  const auto st = build_walker(table_one());
  EXPECT_TRUE(line_of_sight(st[0], st[1], 6371.0));
  // The adjacent-slot chord clears the surface by a*cos(pi/11) - R = 749.4 km.
  const double clearance = kA * std::cos(std::numbers::pi / 11) - 6371.0;
  EXPECT_NEAR(clearance, 749.397, 1e-3);
  EXPECT_TRUE(line_of_sight(st[0], st[1], 6371.0 + clearance - 1.0));
  EXPECT_FALSE(line_of_sight(st[0], st[1], 6371.0 + clearance + 1.0));
}

std::vector<SatelliteState> pair_at_distance(double d) {
  // Two satellites on a circle of radius a separated by chord d.
  const double half = std::asin(d / (2 * kA));
  SatelliteState a, b;
  a.sat_id = 0;
  b.sat_id = 1;
  b.slot_index = 1;
  a.position = Vec3(kA * std::cos(half), kA * std::sin(half), 0);
  b.position = Vec3(kA * std::cos(half), -kA * std::sin(half), 0);
  return {a, b};
}

TEST(Snapshot, RangeBoundary) {
  ConstellationConfig c;
  c.num_planes = 1;
  c.sats_per_plane = 2;
  auto in_range = snapshot(pair_at_distance(3499.9999), c, 0.0, IslPolicy::kRangeGraph);
  ASSERT_EQ(in_range.links.size(), 1u);
  EXPECT_NEAR(in_range.links[0].delay_s, 0.011674743331935323, 1e-9);
  auto out_of_range = snapshot(pair_at_distance(3501.0), c, 0.0, IslPolicy::kRangeGraph);
  EXPECT_TRUE(out_of_range.links.empty());
  EXPECT_EQ(out_of_range.isolated.size(), 2u);
}

TEST(Snapshot, SingleSatellite) {
  ConstellationConfig c;
  c.num_planes = 1;
  c.sats_per_plane = 1;
  for (auto policy : {IslPolicy::kGridCapped, IslPolicy::kRangeGraph}) {
    const auto s = snapshot_at(c, 0.0, policy);
    EXPECT_EQ(s.node_count, 1);
    EXPECT_TRUE(s.links.empty());
  }
}

TEST(Snapshot, InvariantsAcrossTimesAndPolicies) {
  for (int planes : {3, 12, 24}) {
    ConstellationConfig c;
    c.num_planes = planes;
    c.phase_factor = 1;
    const auto epoch = build_walker(c);
    for (double t : {0.0, 60.0, 777.0, 4000.0}) {
      const auto states = propagate(epoch, c, t);
      for (auto policy : {IslPolicy::kGridCapped, IslPolicy::kRangeGraph}) {
        const auto s = snapshot(states, c, t, policy);
        for (std::size_t k = 0; k < s.links.size(); ++k) {
          const auto& l = s.links[k];
          ASSERT_LT(l.a, l.b);
          ASSERT_LT(l.b, s.node_count);
          if (k > 0) {
            ASSERT_LT(std::pair(s.links[k - 1].a, s.links[k - 1].b), std::pair(l.a, l.b));
          }
          const double dist = inter_sat_distance(states[l.a], states[l.b]);
          EXPECT_LE(dist, c.comm_range_km);
          EXPECT_TRUE(line_of_sight(states[l.a], states[l.b], c.earth_radius_km));
          EXPECT_GT(l.delay_s, 0.0);
          EXPECT_NEAR(l.delay_s, dist / kSpeedOfLightKmPerS, 1e-15);
        }
      }
    }
  }
}

TEST(Snapshot, GridCappedIsSubsetOfRangeGraph) {
  const auto c = table_one();
  const auto grid = snapshot_at(c, 300.0, IslPolicy::kGridCapped);
  const auto range = snapshot_at(c, 300.0, IslPolicy::kRangeGraph);
  for (const auto& l : grid.links) {
    EXPECT_NE(std::find(range.links.begin(), range.links.end(), l), range.links.end());
  }
}

TEST(Snapshot, GridCappedProposesRingNeighboursWhenInRange) {
  // Long range: every proposal survives, so each satellite has its two
  // ring neighbours plus nearest in each of the two adjacent planes.
  ConstellationConfig c;
  c.num_planes = 6;
  c.sats_per_plane = 8;
  c.comm_range_km = 8000.0;
  const auto s = snapshot_at(c, 0.0, IslPolicy::kGridCapped);
  std::vector<int> deg(s.node_count, 0);
  for (const auto& l : s.links) ++deg[l.a], ++deg[l.b];
  for (int i = 0; i < s.node_count; ++i) {
    EXPECT_GE(deg[i], 4);
    const int p = i / 8, slot = i % 8;
    auto has = [&](int j) {
      return std::any_of(s.links.begin(), s.links.end(), [&](const Link& l) {
        return (l.a == std::min(i, j) && l.b == std::max(i, j));
      });
    };
    EXPECT_TRUE(has(p * 8 + (slot + 1) % 8));
    EXPECT_TRUE(has(p * 8 + (slot + 7) % 8));
  }
}

TEST(Snapshot, FromEdgesRejectsSelfLinks) {
  EXPECT_THROW(TopologySnapshot::from_edges(3, {{1, 1}}), ArgumentError);
  EXPECT_THROW(TopologySnapshot::from_edges(3, {{1, 3}}), ArgumentError);
  const auto s = TopologySnapshot::from_edges(3, {{2, 0}, {0, 2}});
  ASSERT_EQ(s.links.size(), 1u);
  EXPECT_EQ(s.links[0].a, 0);
  EXPECT_EQ(s.isolated, std::vector<int>{1});
}

TEST(IslPolicy, Parse) {
  EXPECT_EQ(parse_isl_policy("range-graph"), IslPolicy::kRangeGraph);
  EXPECT_EQ(parse_isl_policy("+grid-capped"), IslPolicy::kGridCapped);
  EXPECT_THROW(parse_isl_policy("mesh"), ConfigError);
}

}  // namespace
}  // namespace glr
