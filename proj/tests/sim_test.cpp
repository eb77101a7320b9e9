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
#include <sstream>

#include <gtest/gtest.h>

#include "glr/sim.hpp"
#include "test_util.hpp"

namespace glr {
namespace {

TEST(ApplyInterruptions, Extremes) {
  Rng rng(1);
  const auto snap = TopologySnapshot::from_edges(6, testing::complete(6));
  EXPECT_EQ(apply_interruptions(snap, 0.0, rng).failed_count(), 0u);
  EXPECT_EQ(apply_interruptions(snap, 1.0, rng).failed_count(), snap.links.size());
  EXPECT_THROW(apply_interruptions(snap, 1.5, rng), ArgumentError);
}

TEST(ApplyInterruptions, BinomialMean) {
  // 500 links at p = 0.04: mean 20, sigma = sqrt(500 * 0.04 * 0.96) = 4.38.
  Rng graph_rng(2);
  std::vector<Link> links;
  while (links.size() < 500) {
    const int i = static_cast<int>(graph_rng.index(100)), j = static_cast<int>(graph_rng.index(100));
    if (i != j) links.push_back({i, j, 1e-3});
    auto s = TopologySnapshot::from_links(100, links);
    links = s.links;
  }
  const auto snap = TopologySnapshot::from_links(100, links);
  ASSERT_EQ(snap.links.size(), 500u);
  const double sigma = std::sqrt(500 * 0.04 * 0.96);
  double total = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Rng rng = Rng::stream(77, "trial", trial);
    total += static_cast<double>(apply_interruptions(snap, 0.04, rng).failed_count());
  }
  const double mean = total / 1000.0;
  EXPECT_LT(std::abs(mean - 20.0), 3 * sigma);
  EXPECT_LT(std::abs(mean - 20.0), 3 * sigma / std::sqrt(1000.0));
}

TEST(ApplyInterruptions, CommonRandomNumbersNest) {
  Rng g(3);
  const auto snap = testing::random_snapshot(g, 40, 0.3, true);
  for (int k = 0; k < 20; ++k) {
    std::vector<char> prev(snap.links.size(), 0);
    for (double p : {0.0, 0.02, 0.04, 0.06, 0.08, 0.5}) {
      Rng rng = Rng::stream(5, "interruptions", k);
      const auto mask = apply_interruptions(snap, p, rng).failure_mask();
      for (std::size_t e = 0; e < mask.size(); ++e) {
        if (prev[e]) EXPECT_TRUE(mask[e]);
      }
      prev = mask;
    }
  }
}

ExperimentConfig small_experiment() {
  ExperimentConfig cfg;
  cfg.constellation.num_planes = 6;
  cfg.constellation.sats_per_plane = 8;
  cfg.constellation.comm_range_km = 5000.0;
  cfg.policy = IslPolicy::kRangeGraph;
  cfg.snapshot_times = {0.0, 300.0, 600.0};
  cfg.packets = 200;
  cfg.seed = 9;
  return cfg;
}

ModelParameters some_model() {
  Rng rng(1);
  return ModelParameters::glorot({FeatureLayout::kLow, FeatureLayout::kHigh, 8}, rng);
}

TEST(RunExperiment, ZeroInterruptionAllBaselinesOptimal) {
  auto cfg = small_experiment();
  cfg.constellation = ConstellationConfig{};  // 132 satellites, connected range graph
  cfg.interruption_prob = 0.0;
  cfg.keep_routes = true;
  const auto model = some_model();
  const auto m = run_experiment(cfg, &model);
  ASSERT_EQ(m.packets, 200);
  const auto& tbr = m.at(Algorithm::kTbr);
  for (Algorithm a : {Algorithm::kTbr, Algorithm::kTsr, Algorithm::kCgr}) {
    const auto& am = m.at(a);
    EXPECT_EQ(am.drop_rate, 0.0) << to_string(a);
    EXPECT_EQ(*am.mean_hops, *tbr.mean_hops) << to_string(a);
    for (int k = 0; k < m.packets; ++k) EXPECT_EQ(am.routes[k].hop_count, tbr.routes[k].hop_count);
  }
  for (const auto& am : m.algorithms) EXPECT_EQ(am.delivered + am.dropped, am.packets);
  EXPECT_EQ(m.at(Algorithm::kGlr).decisions, 200);
  EXPECT_EQ(m.at(Algorithm::kTsr).decisions, 200);
  long long hops = 0;
  for (const auto& r : tbr.routes) hops += r.hop_count;
  EXPECT_EQ(tbr.decisions, hops);
}

TEST(RunExperiment, NoPackets) {
  auto cfg = small_experiment();
  cfg.packets = 0;
  cfg.algorithms = {Algorithm::kTbr, Algorithm::kTsr};
  const auto m = run_experiment(cfg);
  for (const auto& a : m.algorithms) {
    EXPECT_EQ(a.packets, 0);
    EXPECT_EQ(a.drop_rate, 0.0);
    EXPECT_FALSE(a.mean_delay_s.has_value());
  }
  std::ostringstream csv;
  write_metrics_csv_rows(csv, m);
  EXPECT_NE(csv.str().find("TBR,48,0,0,0,0,0,,,"), std::string::npos) << csv.str();
}

TEST(RunExperiment, GlrNeedsModel) {
  EXPECT_THROW(run_experiment(small_experiment()), ConfigError);
}

TEST(RunExperiment, InvalidConfig) {
  auto cfg = small_experiment();
  cfg.interruption_prob = -0.1;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  cfg = small_experiment();
  cfg.delay.tx_rate_bps = 0;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
}

TEST(RunExperiment, OutcomesDeterministicAndIndependentOfJobs) {
  auto cfg = small_experiment();
  cfg.interruption_prob = 0.1;
  cfg.keep_routes = true;
  const auto model = some_model();
  const auto a = run_experiment(cfg, &model);
  cfg.jobs = 3;
  const auto b = run_experiment(cfg, &model);
  for (std::size_t k = 0; k < a.algorithms.size(); ++k) {
    EXPECT_EQ(a.algorithms[k].delivered, b.algorithms[k].delivered);
    EXPECT_EQ(a.algorithms[k].mean_delay_s, b.algorithms[k].mean_delay_s);
    for (int i = 0; i < a.packets; ++i) {
      EXPECT_EQ(a.algorithms[k].routes[i].path, b.algorithms[k].routes[i].path);
    }
  }
}

TEST(RunExperiment, DropRateMonotoneInP) {
  auto cfg = small_experiment();
  cfg.algorithms = {Algorithm::kTbr, Algorithm::kTsr};
  std::vector<double> tbr, tsr;
  for (double p : {0.0, 0.05, 0.1, 0.2, 0.4}) {
    cfg.interruption_prob = p;
    const auto m = run_experiment(cfg);
    tbr.push_back(m.at(Algorithm::kTbr).drop_rate);
    tsr.push_back(m.at(Algorithm::kTsr).drop_rate);
  }
  // Per packet, both TBR (reachability) and TSR (path survival) are
  // monotone in the failed set, so the rates must be too.
  EXPECT_TRUE(std::is_sorted(tbr.begin(), tbr.end()));
  EXPECT_TRUE(std::is_sorted(tsr.begin(), tsr.end()));
  EXPECT_GT(tsr.back(), tsr.front());
}

TEST(RunExperiment, SourceRoutingDropsAtLeastAsOftenAsContactPlanRouting) {
  ExperimentConfig cfg;
  cfg.policy = IslPolicy::kRangeGraph;
  cfg.snapshot_times = {0.0, 600.0, 1200.0, 1800.0};
  cfg.interruption_prob = 0.04;
  cfg.packets = 1000;
  cfg.algorithms = {Algorithm::kTsr, Algorithm::kCgr};
  cfg.seed = 2;
  const auto m = run_experiment(cfg);
  EXPECT_EQ(m.nodes, 132);
  EXPECT_GE(m.at(Algorithm::kTsr).drop_rate, m.at(Algorithm::kCgr).drop_rate);
  EXPECT_GT(m.at(Algorithm::kTsr).drop_rate, 0.0);
}

TEST(DrawInstances, SourceNeverEqualsDestination) {
  const auto inst = draw_instances(4, 5000, 3, 7);
  ASSERT_EQ(inst.size(), 5000u);
  for (const auto& pi : inst) {
    EXPECT_NE(pi.source, pi.destination);
    EXPECT_LT(pi.snapshot, 3);
    EXPECT_LT(pi.destination, 7);
  }
}

TEST(Algorithm, Parse) {
  EXPECT_EQ(parse_algorithm("glr"), Algorithm::kGlr);
  EXPECT_EQ(parse_algorithm("CGR"), Algorithm::kCgr);
  EXPECT_THROW(parse_algorithm("ospf"), ConfigError);
}

}  // namespace
}  // namespace glr
