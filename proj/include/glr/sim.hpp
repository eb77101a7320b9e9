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

#ifndef GLR_SIM_HPP_
#define GLR_SIM_HPP_

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "glr/constellation.hpp"
#include "glr/errors.hpp"
#include "glr/gnn.hpp"
#include "glr/rng.hpp"
#include "glr/routing.hpp"

namespace glr {

enum class Algorithm { kGlr, kTbr, kTsr, kCgr };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kGlr: return "GLR";
    case Algorithm::kTbr: return "TBR";
    case Algorithm::kTsr: return "TSR";
    case Algorithm::kCgr: return "CGR";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  if (s == "GLR") return Algorithm::kGlr;
  if (s == "TBR") return Algorithm::kTbr;
  if (s == "TSR") return Algorithm::kTsr;
  if (s == "CGR") return Algorithm::kCgr;
  throw ConfigError("unknown algorithm '" + s + "' (expected GLR, TBR, TSR or CGR)");
}

struct ExperimentConfig {
  ConstellationConfig constellation;
  IslPolicy policy = IslPolicy::kGridCapped;
  std::vector<double> snapshot_times{0.0};
  double interruption_prob = 0.0;
  int packets = 1000;
  DelayModel delay;
  std::vector<Algorithm> algorithms{Algorithm::kGlr, Algorithm::kTbr, Algorithm::kTsr,
                                    Algorithm::kCgr};
  std::optional<std::string> model_path;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool keep_routes = false;

  bool uses(Algorithm a) const {
    return std::find(algorithms.begin(), algorithms.end(), a) != algorithms.end();
  }

  void validate() const {
    constellation.validate();
    if (!(interruption_prob >= 0.0 && interruption_prob <= 1.0)) {
      throw ConfigError("interruption_prob must lie in [0, 1]");
    }
    if (!(delay.tx_rate_bps > 0)) throw ConfigError("tx_rate must be > 0");
    if (!(delay.packet_size_bits >= 0)) throw ConfigError("packet_size must be >= 0");
    if (packets < 0) throw ConfigError("packets must be >= 0");
    if (snapshot_times.empty()) throw ConfigError("at least one snapshot time is required");
    if (algorithms.empty()) throw ConfigError("no algorithm selected");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
  }
};

/// Each planned link fails independently with probability p. One uniform
/// variate is drawn per link in link order, so two calls with the same rng
/// state and p1 < p2 fail nested link sets.
inline ActualTopology apply_interruptions(const TopologySnapshot& planned, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("apply_interruptions: p outside [0, 1]");
  std::vector<char> failed(planned.links.size(), 0);
  for (auto& f : failed) f = rng.uniform() < p ? 1 : 0;
  return ActualTopology(planned, std::move(failed));
}

/// One routed packet instance, shared by every algorithm in a run.
struct PacketInstance {
  int snapshot = 0;
  int source = 0;
  int destination = 0;
};

struct AlgorithmMetrics {
  Algorithm algorithm = Algorithm::kTbr;
  int packets = 0;
  int delivered = 0;
  int dropped = 0;
  double drop_rate = 0.0;
  std::optional<double> mean_delay_s;  // over delivered packets
  std::optional<double> mean_hops;     // over delivered packets
  double median_decision_s = 0.0;      // per decision, median over packets
  double median_packet_s = 0.0;        // per packet, median over packets
  double total_compute_s = 0.0;
  long long decisions = 0;
  std::map<Outcome, int> outcomes;
  std::vector<RouteResult> routes;  // filled when keep_routes
};

struct Metrics {
  int nodes = 0;
  double interruption_prob = 0.0;
  int packets = 0;
  std::vector<AlgorithmMetrics> algorithms;
  std::vector<PacketInstance> instances;  // filled when keep_routes

  const AlgorithmMetrics& at(Algorithm a) const {
    for (const auto& m : algorithms) {
      if (m.algorithm == a) return m;
    }
    throw ArgumentError(std::string("no metrics for ") + to_string(a));
  }
};

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  return (hi + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid))) / 2.0;
}

inline AlgorithmMetrics aggregate(Algorithm a, std::vector<RouteResult> routes, bool keep) {
  AlgorithmMetrics m;
  m.algorithm = a;
  m.packets = static_cast<int>(routes.size());
  double delay = 0.0, hops = 0.0;
  std::vector<double> per_decision, per_packet;
  for (const auto& r : routes) {
    ++m.outcomes[r.outcome];
    if (r.delivered()) {
      ++m.delivered;
      delay += r.total_delay;
      hops += r.hop_count;
    }
    m.total_compute_s += r.decision_time;
    m.decisions += r.decisions;
    per_packet.push_back(r.decision_time);
    if (r.decisions > 0) per_decision.push_back(r.decision_time / r.decisions);
  }
  m.dropped = m.packets - m.delivered;
  m.drop_rate = m.packets > 0 ? static_cast<double>(m.dropped) / m.packets : 0.0;
  if (m.delivered > 0) {
    m.mean_delay_s = delay / m.delivered;
    m.mean_hops = hops / m.delivered;
  }
  m.median_decision_s = median(std::move(per_decision));
  m.median_packet_s = median(std::move(per_packet));
  if (keep) m.routes = std::move(routes);
  return m;
}

}  // namespace detail

/// Draws the packet instances of an experiment. Depends only on the seed,
/// the snapshot count and the node count, never on p.
inline std::vector<PacketInstance> draw_instances(std::uint64_t seed, int packets,
                                                  int snapshots, int nodes) {
  std::vector<PacketInstance> out;
  if (nodes < 2) return out;
  out.reserve(static_cast<std::size_t>(packets));
  for (int k = 0; k < packets; ++k) {
    Rng rng = Rng::stream(seed, "packets", static_cast<std::uint64_t>(k));
    PacketInstance pi;
    pi.snapshot = static_cast<int>(rng.index(static_cast<std::uint64_t>(snapshots)));
    pi.source = static_cast<int>(rng.index(static_cast<std::uint64_t>(nodes)));
    pi.destination = static_cast<int>(rng.index(static_cast<std::uint64_t>(nodes - 1)));
    if (pi.destination >= pi.source) ++pi.destination;
    out.push_back(pi);
  }
  return out;
}

inline RouteResult route_with(Algorithm a, const ModelParameters* params,
                              const ActualTopology& actual, int s, int d, const DelayModel& m) {
  switch (a) {
    case Algorithm::kGlr: return route_glr(*params, actual, s, d, std::nullopt, m);
    case Algorithm::kTbr: return route_tbr(actual, s, d, std::nullopt, m);
    case Algorithm::kTsr: return route_tsr(actual, s, d, m);
    case Algorithm::kCgr: return route_cgr(actual, s, d, std::nullopt, m);
  }
  throw ArgumentError("unknown algorithm");
}

/// Every selected algorithm routes the identical (planned, actual, s, d)
/// instance for each packet. Routing outcomes are a pure function of the
/// config; only timings vary between runs.
inline Metrics run_experiment(const ExperimentConfig& cfg, const ModelParameters* params = nullptr) {
  cfg.validate();
  if (cfg.uses(Algorithm::kGlr) && params == nullptr) {
    throw ConfigError("GLR selected but no model parameters were provided");
  }

  const auto epoch_states = build_walker(cfg.constellation);
  std::vector<TopologySnapshot> snaps;
  for (double t : cfg.snapshot_times) {
    snaps.push_back(snapshot(propagate(epoch_states, cfg.constellation, t), cfg.constellation,
                             t, cfg.policy));
  }

  Metrics out;
  out.nodes = cfg.constellation.size();
  out.interruption_prob = cfg.interruption_prob;
  const auto instances = draw_instances(cfg.seed, cfg.packets, static_cast<int>(snaps.size()),
                                        out.nodes);
  out.packets = static_cast<int>(instances.size());

  const std::size_t n_alg = cfg.algorithms.size();
  std::vector<std::vector<RouteResult>> results(n_alg,
                                                std::vector<RouteResult>(instances.size()));
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t k = begin; k < instances.size(); k += stride) {
      const auto& pi = instances[k];
      Rng rng = Rng::stream(cfg.seed, "interruptions", k);
      const ActualTopology actual =
          apply_interruptions(snaps[pi.snapshot], cfg.interruption_prob, rng);
      for (std::size_t a = 0; a < n_alg; ++a) {
        results[a][k] = route_with(cfg.algorithms[a], params, actual, pi.source,
                                   pi.destination, cfg.delay);
      }
    }
  };
  if (cfg.jobs == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < cfg.jobs; ++j) {
      pool.emplace_back(work, static_cast<std::size_t>(j), static_cast<std::size_t>(cfg.jobs));
    }
  }

  for (std::size_t a = 0; a < n_alg; ++a) {
    out.algorithms.push_back(
        detail::aggregate(cfg.algorithms[a], std::move(results[a]), cfg.keep_routes));
  }
  if (cfg.keep_routes) out.instances = instances;
  return out;
}

inline constexpr const char* kMetricsCsvHeader =
    "algorithm,scale,p,packets,delivered,dropped,drop_rate,mean_delay_s,mean_hops,"
    "median_decision_s,median_packet_s,total_compute_s,decisions";

inline void write_metrics_csv_rows(std::ostream& os, const Metrics& m) {
  char buf[64];
  auto opt = [&buf](const std::optional<double>& v) {
    if (!v) return std::string();
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return std::string(buf);
  };
  for (const auto& a : m.algorithms) {
    std::snprintf(buf, sizeof buf, "%.17g", a.drop_rate);
    const std::string drop = buf;
    std::snprintf(buf, sizeof buf, "%g", m.interruption_prob);
    os << to_string(a.algorithm) << ',' << m.nodes << ',' << buf << ',' << a.packets << ','
       << a.delivered << ',' << a.dropped << ',' << drop << ',' << opt(a.mean_delay_s) << ','
       << opt(a.mean_hops) << ',' << a.median_decision_s << ',' << a.median_packet_s << ','
       << a.total_compute_s << ',' << a.decisions << '\n';
  }
}

}  // namespace glr

#endif  // GLR_SIM_HPP_
