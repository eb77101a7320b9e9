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

#ifndef GLR_DATASET_HPP_
#define GLR_DATASET_HPP_

#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glr/binary_io.hpp"
#include "glr/constellation.hpp"
#include "glr/graph.hpp"
#include "glr/oracle.hpp"
#include "glr/rng.hpp"

namespace glr {

/// One (snapshot, destination) pair ready for the model.
struct TrainingSample {
  std::shared_ptr<const NormalizedAdjacency> adjacency;
  NodeFeatures features;
  std::vector<double> labels;  // hop counts; 0 where mask is 0
  std::vector<double> mask;    // 1 = reachable, contributes to the loss
  int destination = 0;
  int snapshot_index = 0;

  int size() const { return static_cast<int>(labels.size()); }
};

/// Masked labels from an exact distance field.
inline void fill_labels(const DistanceField& field, std::vector<double>& labels,
                        std::vector<double>& mask) {
  labels.assign(field.values.size(), 0.0);
  mask.assign(field.values.size(), 0.0);
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    if (field.reachable(static_cast<int>(i))) {
      labels[i] = field.values[i];
      mask[i] = 1.0;
    }
  }
}

inline TrainingSample make_sample(const AdjacencyMatrix& a,
                                  std::shared_ptr<const NormalizedAdjacency> ahat,
                                  int destination,
                                  const std::vector<Vec3>& positions = {}) {
  TrainingSample s;
  s.adjacency = std::move(ahat);
  s.features = build_features(a, destination, positions);
  fill_labels(hop_distances(a, destination), s.labels, s.mask);
  s.destination = destination;
  return s;
}

struct DatasetProvenance {
  ConstellationConfig constellation;
  IslPolicy policy = IslPolicy::kGridCapped;
  std::vector<double> snapshot_times;
  int destinations_per_snapshot = 16;
  std::uint64_t seed = 0;
};

struct Dataset {
  std::vector<TopologySnapshot> snapshots;
  std::vector<TrainingSample> samples;
  std::vector<int> train;       // sample indices
  std::vector<int> validation;  // sample indices, disjoint from train
  std::vector<char> snapshot_is_validation;
  DatasetProvenance provenance;
  int skipped = 0;  // samples dropped because their snapshot had no links
};

/// Labelled samples for `destinations_per_snapshot` destinations drawn
/// without replacement per snapshot. Whole snapshots go to validation
/// (floor(K/10) of K snapshots) so no snapshot is in both splits.
inline Dataset build_dataset(const ConstellationConfig& config, IslPolicy policy,
                             const std::vector<double>& snapshot_times,
                             int destinations_per_snapshot, std::uint64_t seed) {
  if (snapshot_times.empty()) {
    throw ConfigError("build_dataset: at least one snapshot time is required");
  }
  if (destinations_per_snapshot < 1) {
    throw ConfigError("build_dataset: destinations_per_snapshot must be >= 1");
  }
  config.validate();

  Dataset ds;
  ds.provenance = {config, policy, snapshot_times, destinations_per_snapshot, seed};
  const int k = static_cast<int>(snapshot_times.size());

  std::vector<int> order(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) order[i] = i;
  Rng::stream(seed, "dataset-split").shuffle(order);
  ds.snapshot_is_validation.assign(static_cast<std::size_t>(k), 0);
  for (int i = 0; i < k / 10; ++i) ds.snapshot_is_validation[order[i]] = 1;

  const auto epoch_states = build_walker(config);
  for (int si = 0; si < k; ++si) {
    const double t = snapshot_times[si];
    ds.snapshots.push_back(
        snapshot(propagate(epoch_states, config, t), config, t, policy));
    const TopologySnapshot& snap = ds.snapshots.back();
    const int n = snap.node_count;
    const auto dests = Rng::stream(seed, "dataset-destinations", si)
                           .sample_without_replacement(n, destinations_per_snapshot);
    if (snap.links.empty()) {
      ds.skipped += static_cast<int>(dests.size());
      continue;
    }
    const AdjacencyMatrix a = adjacency(snap);
    auto ahat = std::make_shared<const NormalizedAdjacency>(normalize(a));
    for (int d : dests) {
      TrainingSample s = make_sample(a, ahat, d, snap.positions);
      s.snapshot_index = si;
      const int idx = static_cast<int>(ds.samples.size());
      (ds.snapshot_is_validation[si] ? ds.validation : ds.train).push_back(idx);
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

inline nlohmann::json to_json(const ConstellationConfig& c) {
  return {{"num_planes", c.num_planes},
          {"sats_per_plane", c.sats_per_plane},
          {"altitude_km", c.altitude_km},
          {"inclination_deg", c.inclination_deg},
          {"eccentricity", c.eccentricity},
          {"phase_factor", c.phase_factor},
          {"comm_range_km", c.comm_range_km},
          {"earth_radius_km", c.earth_radius_km},
          {"mu", c.mu},
          {"epoch_s", c.epoch_s}};
}

inline ConstellationConfig constellation_from_json(const nlohmann::json& j) {
  ConstellationConfig c;
  c.num_planes = j.at("num_planes").get<int>();
  c.sats_per_plane = j.at("sats_per_plane").get<int>();
  c.altitude_km = j.at("altitude_km").get<double>();
  c.inclination_deg = j.at("inclination_deg").get<double>();
  c.eccentricity = j.at("eccentricity").get<double>();
  c.phase_factor = j.at("phase_factor").get<int>();
  c.comm_range_km = j.at("comm_range_km").get<double>();
  c.earth_radius_km = j.at("earth_radius_km").get<double>();
  c.mu = j.at("mu").get<double>();
  c.epoch_s = j.at("epoch_s").get<double>();
  return c;
}

inline constexpr char kDatasetMagic[8] = {'G', 'L', 'R', 'D', 'S', 'E', 'T', '\0'};
inline constexpr std::uint32_t kDatasetVersion = 1;

// Layout (little-endian) is documented in docs/FORMATS.md.
inline void save_dataset(const Dataset& ds, const std::string& path) {
  io::Writer w(path);
  w.bytes(kDatasetMagic, sizeof kDatasetMagic);
  w.u32(kDatasetVersion);
  w.u32(FeatureLayout::kLow);
  w.u32(FeatureLayout::kHigh);
  w.u32(static_cast<std::uint32_t>(ds.snapshots.size()));
  w.u32(static_cast<std::uint32_t>(ds.samples.size()));
  w.u32(static_cast<std::uint32_t>(ds.skipped));

  const auto& p = ds.provenance;
  nlohmann::json prov = {{"constellation", to_json(p.constellation)},
                         {"isl_policy", to_string(p.policy)},
                         {"snapshot_times", p.snapshot_times},
                         {"destinations_per_snapshot", p.destinations_per_snapshot},
                         {"seed", p.seed}};
  w.string(prov.dump());

  for (std::size_t k = 0; k < ds.snapshots.size(); ++k) {
    const auto& s = ds.snapshots[k];
    w.f64(s.time);
    w.u32(static_cast<std::uint32_t>(s.node_count));
    w.u8(ds.snapshot_is_validation[k]);
    w.u32(static_cast<std::uint32_t>(s.links.size()));
    for (const auto& l : s.links) {
      w.u32(static_cast<std::uint32_t>(l.a));
      w.u32(static_cast<std::uint32_t>(l.b));
      w.f64(l.delay_s);
    }
    w.u8(s.positions.empty() ? 0 : 1);
    for (const auto& x : s.positions) {
      w.f64(x.x());
      w.f64(x.y());
      w.f64(x.z());
    }
  }
  for (const auto& s : ds.samples) {
    w.u32(static_cast<std::uint32_t>(s.snapshot_index));
    w.u32(static_cast<std::uint32_t>(s.destination));
    w.u32(static_cast<std::uint32_t>(s.size()));
    for (int i = 0; i < s.size(); ++i) {
      for (int c = 0; c < FeatureLayout::kHigh; ++c) w.f64(s.features.high(i, c));
    }
    for (double v : s.labels) w.f64(v);
    for (double v : s.mask) w.u8(v != 0.0 ? 1 : 0);
  }
  w.close();
}

inline Dataset load_dataset(const std::string& path) {
  io::Reader r(path);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kDatasetMagic, sizeof magic) != 0) {
    throw FormatError(path + ": not a dataset file (bad magic)");
  }
  const auto version = r.u32();
  if (version != kDatasetVersion) {
    throw FormatError(path + ": dataset version " + std::to_string(version) +
                      ", expected " + std::to_string(kDatasetVersion));
  }
  const auto f_low = r.u32(), f_high = r.u32();
  if (f_low != FeatureLayout::kLow || f_high != FeatureLayout::kHigh) {
    throw FormatError(path + ": feature widths " + std::to_string(f_low) + "/" +
                      std::to_string(f_high) + ", expected " +
                      std::to_string(FeatureLayout::kLow) + "/" +
                      std::to_string(FeatureLayout::kHigh));
  }
  const auto n_snap = r.u32(), n_samples = r.u32();
  Dataset ds;
  ds.skipped = static_cast<int>(r.u32());

  const auto prov = nlohmann::json::parse(r.string());
  ds.provenance.constellation = constellation_from_json(prov.at("constellation"));
  ds.provenance.policy = parse_isl_policy(prov.at("isl_policy").get<std::string>());
  ds.provenance.snapshot_times = prov.at("snapshot_times").get<std::vector<double>>();
  ds.provenance.destinations_per_snapshot =
      prov.at("destinations_per_snapshot").get<int>();
  ds.provenance.seed = prov.at("seed").get<std::uint64_t>();

  std::vector<std::shared_ptr<const NormalizedAdjacency>> ahats;
  for (std::uint32_t k = 0; k < n_snap; ++k) {
    const double t = r.f64();
    const int n = static_cast<int>(r.u32());
    ds.snapshot_is_validation.push_back(static_cast<char>(r.u8()));
    const auto m = r.u32();
    std::vector<Link> links(m);
    for (auto& l : links) {
      l.a = static_cast<int>(r.u32());
      l.b = static_cast<int>(r.u32());
      l.delay_s = r.f64();
    }
    TopologySnapshot snap = TopologySnapshot::from_links(n, std::move(links));
    snap.time = t;
    snap.policy = ds.provenance.policy;
    if (r.u8()) {
      snap.positions.resize(static_cast<std::size_t>(n));
      for (auto& x : snap.positions) {
        const double px = r.f64(), py = r.f64(), pz = r.f64();
        x = Vec3(px, py, pz);
      }
    }
    ahats.push_back(std::make_shared<const NormalizedAdjacency>(normalize(adjacency(snap))));
    ds.snapshots.push_back(std::move(snap));
  }
  for (std::uint32_t k = 0; k < n_samples; ++k) {
    TrainingSample s;
    s.snapshot_index = static_cast<int>(r.u32());
    s.destination = static_cast<int>(r.u32());
    const int n = static_cast<int>(r.u32());
    if (s.snapshot_index >= static_cast<int>(n_snap) ||
        ds.snapshots[s.snapshot_index].node_count != n || s.destination >= n) {
      throw FormatError(path + ": sample " + std::to_string(k) +
                        " inconsistent with its snapshot");
    }
    s.adjacency = ahats[s.snapshot_index];
    s.features.high.resize(n, FeatureLayout::kHigh);
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < FeatureLayout::kHigh; ++c) s.features.high(i, c) = r.f64();
    }
    s.features.low = s.features.high.leftCols(FeatureLayout::kLow);
    s.labels.resize(static_cast<std::size_t>(n));
    for (auto& v : s.labels) v = r.f64();
    s.mask.resize(static_cast<std::size_t>(n));
    for (auto& v : s.mask) v = r.u8() ? 1.0 : 0.0;
    const int idx = static_cast<int>(ds.samples.size());
    (ds.snapshot_is_validation[s.snapshot_index] ? ds.validation : ds.train).push_back(idx);
    ds.samples.push_back(std::move(s));
  }
  r.expect_end();
  return ds;
}

}  // namespace glr

#endif  // GLR_DATASET_HPP_
