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

#ifndef GLR_ROUTING_HPP_
#define GLR_ROUTING_HPP_

#include <algorithm>
#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "glr/constellation.hpp"
#include "glr/gnn.hpp"
#include "glr/graph.hpp"
#include "glr/oracle.hpp"

namespace glr {

struct DelayModel {
  double packet_size_bits = 8000.0;
  double tx_rate_bps = 100000.0;
};

/// Propagation plus transmission delay of one hop.
inline double hop_delay(double link_delay_s, double packet_size_bits, double tx_rate_bps) {
  if (!(tx_rate_bps > 0)) throw ArgumentError("hop_delay: tx_rate must be > 0");
  return link_delay_s + packet_size_bits / tx_rate_bps;
}

inline double hop_delay(double link_delay_s, const DelayModel& m) {
  return hop_delay(link_delay_s, m.packet_size_bits, m.tx_rate_bps);
}

/// A planned snapshot with some of its links interrupted.
class ActualTopology {
 public:
  ActualTopology(const TopologySnapshot& planned, std::vector<char> failed)
      : planned_(&planned),
        planned_adj_(adjacency(planned)),
        failed_(std::move(failed)) {
    if (failed_.size() != planned.links.size()) {
      throw ArgumentError("ActualTopology: failure mask size != link count");
    }
    std::vector<Link> alive;
    for (std::size_t k = 0; k < planned.links.size(); ++k) {
      if (failed_[k]) {
        failed_pairs_.emplace_back(planned.links[k].a, planned.links[k].b);
      } else {
        alive.push_back(planned.links[k]);
      }
    }
    surviving_ = AdjacencyMatrix::from_links(planned.node_count, alive);
  }

  explicit ActualTopology(const TopologySnapshot& planned)
      : ActualTopology(planned, std::vector<char>(planned.links.size(), 0)) {}

  const TopologySnapshot& planned() const { return *planned_; }
  const AdjacencyMatrix& planned_adjacency() const { return planned_adj_; }
  const AdjacencyMatrix& surviving() const { return surviving_; }
  const std::vector<char>& failure_mask() const { return failed_; }
  std::size_t failed_count() const { return failed_pairs_.size(); }
  int size() const { return planned_->node_count; }

  bool is_failed(int u, int v) const {
    const std::pair<int, int> key(std::min(u, v), std::max(u, v));
    return std::binary_search(failed_pairs_.begin(), failed_pairs_.end(), key);
  }

 private:
  const TopologySnapshot* planned_;
  AdjacencyMatrix planned_adj_;
  std::vector<char> failed_;
  std::vector<std::pair<int, int>> failed_pairs_;  // sorted, as links are
  AdjacencyMatrix surviving_;
};

enum class Outcome { kDelivered, kDroppedNoNextHop, kDroppedTtl, kDroppedLinkFail };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::kDelivered: return "DELIVERED";
    case Outcome::kDroppedNoNextHop: return "DROPPED_NO_NEXT_HOP";
    case Outcome::kDroppedTtl: return "DROPPED_TTL";
    case Outcome::kDroppedLinkFail: return "DROPPED_LINK_FAIL";
  }
  return "?";
}

struct RouteResult {
  std::vector<int> path;
  Outcome outcome = Outcome::kDroppedNoNextHop;
  double total_delay = 0.0;   // seconds, propagation + transmission
  int hop_count = 0;
  double decision_time = 0.0;  // seconds spent computing routes
  // Model inferences (GLR) or shortest-path computations (baselines).
  int decisions = 0;

  bool delivered() const { return outcome == Outcome::kDelivered; }
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline void check_endpoints(int n, int s, int d) {
  if (s < 0 || s >= n || d < 0 || d >= n) {
    throw ArgumentError("route: source/destination out of range");
  }
}

inline void advance(RouteResult& r, const AdjacencyMatrix& a, int next,
                    const DelayModel& m) {
  r.total_delay += hop_delay(a.delay(r.path.back(), next), m);
  r.path.push_back(next);
  r.hop_count = static_cast<int>(r.path.size()) - 1;
}

}  // namespace detail

/// Surviving, unvisited neighbour of `current` with the smallest predicted
/// distance; ties go to the shorter link, then the smaller node id.
inline std::optional<int> glr_next_hop(const DistanceField& field, int current,
                                       const std::vector<char>& visited,
                                       const ActualTopology& actual) {
  std::optional<int> best;
  double best_value = 0.0, best_delay = 0.0;
  for (const auto& nb : actual.surviving().neighbors(current)) {
    if (visited[nb.node]) continue;
    const double v = field.values[nb.node];
    if (!best || v < best_value || (v == best_value && nb.delay_s < best_delay)) {
      best = nb.node;
      best_value = v;
      best_delay = nb.delay_s;
    }
  }
  return best;
}

/// Greedy descent on a given distance field.
inline RouteResult walk_field(const DistanceField& field, const ActualTopology& actual, int s,
                              int d, int ttl, const DelayModel& m = {}) {
  detail::check_endpoints(actual.size(), s, d);
  RouteResult r;
  r.path = {s};
  std::vector<char> visited(static_cast<std::size_t>(actual.size()), 0);
  visited[s] = 1;
  while (r.path.back() != d) {
    if (r.hop_count >= ttl) {
      r.outcome = Outcome::kDroppedTtl;
      return r;
    }
    const auto t0 = detail::Clock::now();
    const auto next = glr_next_hop(field, r.path.back(), visited, actual);
    r.decision_time += detail::seconds_since(t0);
    if (!next) {
      r.outcome = Outcome::kDroppedNoNextHop;
      return r;
    }
    visited[*next] = 1;
    detail::advance(r, actual.surviving(), *next, m);
  }
  r.outcome = Outcome::kDelivered;
  return r;
}

/// Learned routing: one inference on the surviving topology gives the
/// predicted distance field for d, then the packet descends it hop by hop.
inline RouteResult route_glr(const ModelParameters& params, const ActualTopology& actual, int s,
                             int d, std::optional<int> ttl = std::nullopt,
                             const DelayModel& m = {}) {
  detail::check_endpoints(actual.size(), s, d);
  if (s == d) {
    RouteResult r;
    r.path = {s};
    r.outcome = Outcome::kDelivered;
    return r;
  }
  const auto t0 = detail::Clock::now();
  const DistanceField field = infer(params, actual.surviving(), d, actual.planned().positions);
  const double inference = detail::seconds_since(t0);
  RouteResult r = walk_field(field, actual, s, d, ttl.value_or(actual.size()), m);
  r.decision_time += inference;
  r.decisions = 1;
  return r;
}

/// Exact per-hop recomputation of the minimum-hop path on the surviving
/// topology; the packet takes the first edge each time.
inline RouteResult route_tbr(const ActualTopology& actual, int s, int d,
                             std::optional<int> ttl = std::nullopt, const DelayModel& m = {}) {
  detail::check_endpoints(actual.size(), s, d);
  const int limit = ttl.value_or(actual.size());
  RouteResult r;
  r.path = {s};
  while (r.path.back() != d) {
    if (r.hop_count >= limit) {
      r.outcome = Outcome::kDroppedTtl;
      return r;
    }
    const auto t0 = detail::Clock::now();
    const auto path = dijkstra(actual.surviving(), r.path.back(), d, Metric::kHops);
    r.decision_time += detail::seconds_since(t0);
    ++r.decisions;
    if (!path) {
      r.outcome = Outcome::kDroppedNoNextHop;
      return r;
    }
    detail::advance(r, actual.surviving(), path->nodes[1], m);
  }
  r.outcome = Outcome::kDelivered;
  return r;
}

/// Source routing: one shortest-path computation on the planned topology;
/// the packet follows it blindly and is lost at the first failed link.
inline RouteResult route_tsr(const ActualTopology& actual, int s, int d,
                             const DelayModel& m = {}) {
  detail::check_endpoints(actual.size(), s, d);
  RouteResult r;
  r.path = {s};
  if (s == d) {
    r.outcome = Outcome::kDelivered;
    return r;
  }
  const auto t0 = detail::Clock::now();
  const auto path = dijkstra(actual.planned_adjacency(), s, d, Metric::kHops);
  r.decision_time = detail::seconds_since(t0);
  r.decisions = 1;
  if (!path) {
    r.outcome = Outcome::kDroppedNoNextHop;
    return r;
  }
  for (std::size_t k = 1; k < path->nodes.size(); ++k) {
    if (actual.is_failed(r.path.back(), path->nodes[k])) {
      r.outcome = Outcome::kDroppedLinkFail;
      return r;
    }
    detail::advance(r, actual.planned_adjacency(), path->nodes[k], m);
  }
  r.outcome = Outcome::kDelivered;
  return r;
}

/// Contact-plan routing: Dijkstra over the planned links still believed
/// usable. A failed next link is discovered on contact, removed from the
/// working plan and the route recomputed. Visited nodes are excluded so
/// rerouting never revisits a node.
inline RouteResult route_cgr(const ActualTopology& actual, int s, int d,
                             std::optional<int> ttl = std::nullopt, const DelayModel& m = {}) {
  detail::check_endpoints(actual.size(), s, d);
  const int limit = ttl.value_or(actual.size());
  RouteResult r;
  r.path = {s};
  std::vector<char> visited(static_cast<std::size_t>(actual.size()), 0);
  visited[s] = 1;
  std::set<std::pair<int, int>> removed;
  auto key = [](int u, int v) { return std::pair(std::min(u, v), std::max(u, v)); };

  while (r.path.back() != d) {
    if (r.hop_count >= limit) {
      r.outcome = Outcome::kDroppedTtl;
      return r;
    }
    const int current = r.path.back();
    const auto t0 = detail::Clock::now();
    std::optional<int> next;
    while (true) {
      ++r.decisions;
      const auto path = dijkstra(actual.planned_adjacency(), current, d, Metric::kHops,
                                 [&](int from, int to) {
                                   return !(visited[from] && from != current) &&
                                          !removed.count(key(from, to));
                                 });
      if (!path) break;
      const int candidate = path->nodes[1];
      if (actual.is_failed(current, candidate)) {
        removed.insert(key(current, candidate));
        continue;
      }
      next = candidate;
      break;
    }
    r.decision_time += detail::seconds_since(t0);
    if (!next) {
      r.outcome = Outcome::kDroppedNoNextHop;
      return r;
    }
    visited[*next] = 1;
    detail::advance(r, actual.planned_adjacency(), *next, m);
  }
  r.outcome = Outcome::kDelivered;
  return r;
}

}  // namespace glr

#endif  // GLR_ROUTING_HPP_
