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

#ifndef GLR_ORACLE_HPP_
#define GLR_ORACLE_HPP_

#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

#include "glr/graph.hpp"

namespace glr {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

/// Exact or predicted communication distance (hop count) of every node to
/// one destination.
struct DistanceField {
  enum class Source { kExact, kPredicted };

  int destination = 0;
  std::vector<double> values;  // kUnreachable where no path exists
  Source source = Source::kExact;

  int size() const { return static_cast<int>(values.size()); }
  bool reachable(int i) const { return values[i] != kUnreachable; }
};

inline DistanceField hop_distances(const AdjacencyMatrix& a, int d) {
  detail::check_node(a, d, "hop_distances");
  const auto hops = detail::bfs_hops(a, d, std::numeric_limits<int>::max());
  DistanceField f;
  f.destination = d;
  f.source = DistanceField::Source::kExact;
  f.values.resize(hops.size());
  for (std::size_t i = 0; i < hops.size(); ++i) {
    f.values[i] = hops[i] < 0 ? kUnreachable : static_cast<double>(hops[i]);
  }
  return f;
}

enum class Metric { kHops, kDelay };

struct Path {
  std::vector<int> nodes;
  int hops = 0;
  double delay_s = 0.0;
};

/// Traversal filter: returns false to forbid moving from `from` to `to`.
using LinkFilter = std::function<bool(int from, int to)>;

/// Minimum-metric path from s to d. Ties are broken by (metric, cumulative
/// delay or hops, smallest next-node id), applied at every node along the
/// path. The search runs outward from d so every settled node knows its
/// tie-broken next hop, and stops once s is settled.
inline std::optional<Path> dijkstra(const AdjacencyMatrix& a, int s, int d,
                                    Metric metric,
                                    const LinkFilter& allow = nullptr) {
  detail::check_node(a, s, "dijkstra");
  detail::check_node(a, d, "dijkstra");
  const int n = a.size();
  const double inf = std::numeric_limits<double>::infinity();
  struct Cost {
    double primary;
    double secondary;
  };
  std::vector<Cost> best(static_cast<std::size_t>(n), Cost{inf, inf});
  std::vector<int> next(static_cast<std::size_t>(n), -1);
  std::vector<char> settled(static_cast<std::size_t>(n), 0);

  using Entry = std::tuple<double, double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  best[d] = {0.0, 0.0};
  heap.emplace(0.0, 0.0, d);

  while (!heap.empty()) {
    auto [p, q, u] = heap.top();
    heap.pop();
    if (settled[u] || p != best[u].primary || q != best[u].secondary) continue;
    settled[u] = 1;
    if (u == s) break;
    for (const auto& nb : a.neighbors(u)) {
      const int v = nb.node;
      if (settled[v]) continue;
      if (allow && !allow(v, u)) continue;
      const double step_p = metric == Metric::kHops ? 1.0 : nb.delay_s;
      const double step_q = metric == Metric::kHops ? nb.delay_s : 1.0;
      const Cost cand{p + step_p, q + step_q};
      const Cost& cur = best[v];
      if (cand.primary < cur.primary ||
          (cand.primary == cur.primary && cand.secondary < cur.secondary)) {
        best[v] = cand;
        next[v] = u;
        heap.emplace(cand.primary, cand.secondary, v);
      } else if (cand.primary == cur.primary && cand.secondary == cur.secondary &&
                 u < next[v]) {
        next[v] = u;
      }
    }
  }
  if (!settled[s]) return std::nullopt;

  Path path;
  for (int u = s;; u = next[u]) {
    path.nodes.push_back(u);
    if (u == d) break;
  }
  path.hops = static_cast<int>(path.nodes.size()) - 1;
  for (int i = 0; i < path.hops; ++i) {
    path.delay_s += a.delay(path.nodes[i], path.nodes[i + 1]);
  }
  return path;
}

/// Exhaustive enumeration of simple paths with at most max_hops hops.
/// Minimum hops, then minimum cumulative delay, then lexicographically
/// smallest node sequence. Exponential; intended for small graphs.
inline std::optional<Path> brute_force_shortest(const AdjacencyMatrix& a,
                                                int s, int d, int max_hops) {
  detail::check_node(a, s, "brute_force_shortest");
  detail::check_node(a, d, "brute_force_shortest");
  std::optional<Path> best;
  std::vector<int> stack{s};
  std::vector<char> on_path(static_cast<std::size_t>(a.size()), 0);
  on_path[s] = 1;

  auto better = [](const Path& x, const Path& y) {
    if (x.hops != y.hops) return x.hops < y.hops;
    if (x.delay_s != y.delay_s) return x.delay_s < y.delay_s;
    return x.nodes < y.nodes;
  };

  std::function<void(double)> extend = [&](double delay) {
    const int u = stack.back();
    const int hops = static_cast<int>(stack.size()) - 1;
    if (u == d) {
      Path p{stack, hops, delay};
      if (!best || better(p, *best)) best = std::move(p);
      return;
    }
    if (hops >= max_hops || (best && hops >= best->hops)) return;
    for (const auto& nb : a.neighbors(u)) {
      if (on_path[nb.node]) continue;
      on_path[nb.node] = 1;
      stack.push_back(nb.node);
      extend(delay + nb.delay_s);
      stack.pop_back();
      on_path[nb.node] = 0;
    }
  };
  extend(0.0);
  return best;
}

}  // namespace glr

#endif  // GLR_ORACLE_HPP_
