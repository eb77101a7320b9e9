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

#ifndef GLR_CONFIG_HPP_
#define GLR_CONFIG_HPP_

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glr/constellation.hpp"
#include "glr/dataset.hpp"
#include "glr/errors.hpp"
#include "glr/sim.hpp"
#include "glr/train.hpp"

namespace glr {

/// Plain-text `key = value` file. '#' starts a comment; blank lines are
/// ignored. Keys are documented in docs/FORMATS.md.
class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(std::istream& in, const std::string& origin = "<config>") {
    KeyValueFile kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
      }
      const std::string key = trim(t.substr(0, eq));
      if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
      kv.values_[key] = trim(t.substr(eq + 1));
    }
    return kv;
  }

  static KeyValueFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    return parse(in, path);
  }

  bool has(const std::string& k) const { return values_.count(k) > 0; }
  void set(const std::string& k, const std::string& v) { values_[k] = v; }
  const std::map<std::string, std::string>& values() const { return values_; }

  template <typename T>
  void get(const std::string& key, T& out) const {
    auto it = values_.find(key);
    if (it == values_.end()) return;
    std::istringstream is(it->second);
    T v{};
    if (!(is >> v) || !(is >> std::ws).eof()) {
      throw ConfigError("config key '" + key + "': cannot parse '" + it->second + "'");
    }
    out = v;
  }

  void get(const std::string& key, std::string& out) const {
    if (auto it = values_.find(key); it != values_.end()) out = it->second;
  }

  template <typename T>
  void get_list(const std::string& key, std::vector<T>& out) const {
    auto it = values_.find(key);
    if (it == values_.end()) return;
    std::vector<T> v;
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      std::istringstream is(item);
      T x{};
      if (!(is >> x) || !(is >> std::ws).eof()) {
        throw ConfigError("config key '" + key + "': cannot parse list item '" + item + "'");
      }
      v.push_back(x);
    }
    out = std::move(v);
  }

  std::vector<std::string> unknown_keys(const std::set<std::string>& known) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) {
      if (!known.count(k)) out.push_back(k);
    }
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

inline std::vector<double> snapshot_schedule(double start, double interval, int count) {
  std::vector<double> t;
  for (int k = 0; k < count; ++k) t.push_back(start + k * interval);
  return t;
}

/// Everything one pipeline run needs, resolved from file + flag overrides.
struct RunConfig {
  ConstellationConfig constellation;
  IslPolicy policy = IslPolicy::kGridCapped;
  double elevation_mask_deg = 50.4;  // recorded only; no ground segment

  // Snapshots used for `constellation` export and dataset building.
  double snapshot_start_s = 0.0;
  double snapshot_interval_s = 60.0;
  int snapshot_count = 1;
  int destinations_per_snapshot = 16;

  Hyperparameters hyper;

  // Evaluation.
  double eval_snapshot_start_s = 0.0;
  double eval_snapshot_interval_s = 60.0;
  int eval_snapshot_count = 1;
  int packets = 1000;
  double interruption_prob = 0.04;
  std::vector<double> p_sweep;    // empty: just interruption_prob
  std::vector<int> plane_sweep;   // empty: just constellation.num_planes
  DelayModel delay;
  std::vector<std::string> algorithms{"GLR", "TBR", "TSR", "CGR"};

  std::uint64_t seed = 0;
  int jobs = 1;

  std::vector<double> snapshot_times() const {
    return snapshot_schedule(snapshot_start_s, snapshot_interval_s, snapshot_count);
  }
  std::vector<double> eval_snapshot_times() const {
    return snapshot_schedule(eval_snapshot_start_s, eval_snapshot_interval_s, eval_snapshot_count);
  }

  static const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "num_planes", "sats_per_plane", "altitude_km", "inclination_deg", "eccentricity",
        "phase_factor", "comm_range_km", "earth_radius_km", "mu", "epoch_s", "isl_policy",
        "max_elevation_deg", "snapshot_start_s", "snapshot_interval_s", "snapshot_count",
        "destinations_per_snapshot", "learning_rate", "beta", "epochs", "batch", "patience",
        "hidden", "optimizer", "eval_snapshot_start_s", "eval_snapshot_interval_s",
        "eval_snapshot_count", "packets", "interruption_prob", "p_sweep", "plane_sweep",
        "packet_size_bits", "tx_rate_bps", "algorithms", "seed", "jobs"};
    return keys;
  }

  void apply(const KeyValueFile& kv) {
    if (auto unknown = kv.unknown_keys(known_keys()); !unknown.empty()) {
      throw ConfigError("unknown config key '" + unknown.front() + "'");
    }
    auto& c = constellation;
    kv.get("num_planes", c.num_planes);
    kv.get("sats_per_plane", c.sats_per_plane);
    kv.get("altitude_km", c.altitude_km);
    kv.get("inclination_deg", c.inclination_deg);
    kv.get("eccentricity", c.eccentricity);
    kv.get("phase_factor", c.phase_factor);
    kv.get("comm_range_km", c.comm_range_km);
    kv.get("earth_radius_km", c.earth_radius_km);
    kv.get("mu", c.mu);
    kv.get("epoch_s", c.epoch_s);
    std::string policy_name;
    kv.get("isl_policy", policy_name);
    if (!policy_name.empty()) policy = parse_isl_policy(policy_name);
    kv.get("max_elevation_deg", elevation_mask_deg);

    kv.get("snapshot_start_s", snapshot_start_s);
    kv.get("snapshot_interval_s", snapshot_interval_s);
    kv.get("snapshot_count", snapshot_count);
    kv.get("destinations_per_snapshot", destinations_per_snapshot);

    kv.get("learning_rate", hyper.learning_rate);
    kv.get("beta", hyper.beta);
    kv.get("epochs", hyper.epochs);
    kv.get("batch", hyper.batch);
    kv.get("patience", hyper.early_stop_patience);
    kv.get("hidden", hyper.hidden);
    std::string opt;
    kv.get("optimizer", opt);
    if (opt == "adam") hyper.optimizer = Optimizer::kAdam;
    else if (opt == "sgd") hyper.optimizer = Optimizer::kSgd;
    else if (!opt.empty()) throw ConfigError("optimizer must be adam or sgd");

    kv.get("eval_snapshot_start_s", eval_snapshot_start_s);
    kv.get("eval_snapshot_interval_s", eval_snapshot_interval_s);
    kv.get("eval_snapshot_count", eval_snapshot_count);
    kv.get("packets", packets);
    kv.get("interruption_prob", interruption_prob);
    kv.get_list("p_sweep", p_sweep);
    kv.get_list("plane_sweep", plane_sweep);
    kv.get("packet_size_bits", delay.packet_size_bits);
    kv.get("tx_rate_bps", delay.tx_rate_bps);
    kv.get_list("algorithms", algorithms);

    kv.get("seed", seed);
    kv.get("jobs", jobs);
    hyper.seed = seed;
  }

  void validate() const {
    constellation.validate();
    if (snapshot_count < 1) throw ConfigError("snapshot_count must be >= 1");
    if (eval_snapshot_count < 1) throw ConfigError("eval_snapshot_count must be >= 1");
    if (!(snapshot_interval_s > 0)) throw ConfigError("snapshot_interval_s must be > 0");
    if (snapshot_start_s < 0 || eval_snapshot_start_s < 0) {
      throw ConfigError("snapshot start times must be >= 0");
    }
    if (destinations_per_snapshot < 1) throw ConfigError("destinations_per_snapshot must be >= 1");
    hyper.validate();
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
  }

  ExperimentConfig experiment(double p, int planes) const {
    ExperimentConfig e;
    e.constellation = constellation;
    e.constellation.num_planes = planes;
    e.policy = policy;
    e.snapshot_times = eval_snapshot_times();
    e.interruption_prob = p;
    e.packets = packets;
    e.delay = delay;
    e.algorithms.clear();
    for (const auto& a : algorithms) e.algorithms.push_back(parse_algorithm(a));
    e.seed = seed;
    e.jobs = jobs;
    return e;
  }

  nlohmann::json to_json() const {
    return {{"constellation", glr::to_json(constellation)},
            {"isl_policy", to_string(policy)},
            {"max_elevation_deg", elevation_mask_deg},
            {"snapshot_start_s", snapshot_start_s},
            {"snapshot_interval_s", snapshot_interval_s},
            {"snapshot_count", snapshot_count},
            {"destinations_per_snapshot", destinations_per_snapshot},
            {"learning_rate", hyper.learning_rate},
            {"beta", hyper.beta},
            {"epochs", hyper.epochs},
            {"batch", hyper.batch},
            {"patience", hyper.early_stop_patience},
            {"hidden", hyper.hidden},
            {"optimizer", hyper.optimizer == Optimizer::kAdam ? "adam" : "sgd"},
            {"eval_snapshot_start_s", eval_snapshot_start_s},
            {"eval_snapshot_interval_s", eval_snapshot_interval_s},
            {"eval_snapshot_count", eval_snapshot_count},
            {"packets", packets},
            {"interruption_prob", interruption_prob},
            {"p_sweep", p_sweep},
            {"plane_sweep", plane_sweep},
            {"packet_size_bits", delay.packet_size_bits},
            {"tx_rate_bps", delay.tx_rate_bps},
            {"algorithms", algorithms},
            {"seed", seed},
            {"jobs", jobs}};
  }
};

}  // namespace glr

#endif  // GLR_CONFIG_HPP_
