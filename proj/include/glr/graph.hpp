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

#ifndef GLR_GRAPH_HPP_
#define GLR_GRAPH_HPP_

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "glr/constellation.hpp"
#include "glr/errors.hpp"

namespace glr {

struct Neighbor {
  int node = 0;
  double delay_s = 0.0;
};

/// Symmetric 0/1 adjacency with zero diagonal, stored as sorted neighbour
/// lists that also carry each link's propagation delay.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(int n) : rows_(static_cast<std::size_t>(n)) {}

  int size() const { return static_cast<int>(rows_.size()); }
  int degree(int i) const { return static_cast<int>(rows_[i].size()); }
  const std::vector<Neighbor>& neighbors(int i) const { return rows_[i]; }

  bool linked(int i, int j) const {
    const auto& r = rows_[i];
    auto it = std::lower_bound(r.begin(), r.end(), j,
                               [](const Neighbor& x, int v) { return x.node < v; });
    return it != r.end() && it->node == j;
  }

  int operator()(int i, int j) const { return linked(i, j) ? 1 : 0; }

  /// Delay of link {i,j}; NaN when absent.
  double delay(int i, int j) const {
    const auto& r = rows_[i];
    auto it = std::lower_bound(r.begin(), r.end(), j,
                               [](const Neighbor& x, int v) { return x.node < v; });
    return (it != r.end() && it->node == j) ? it->delay_s : std::nan("");
  }

  int max_degree() const {
    int m = 0;
    for (const auto& r : rows_) m = std::max(m, static_cast<int>(r.size()));
    return m;
  }

  std::size_t link_count() const {
    std::size_t m = 0;
    for (const auto& r : rows_) m += r.size();
    return m / 2;
  }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size(), size());
    for (int i = 0; i < size(); ++i) {
      for (const auto& nb : rows_[i]) m(i, nb.node) = 1.0;
    }
    return m;
  }

  /// Links must already be valid (no self-links, endpoints in range).
  static AdjacencyMatrix from_links(int n, const std::vector<Link>& links) {
    AdjacencyMatrix a(n);
    for (const auto& l : links) {
      a.rows_[l.a].push_back({l.b, l.delay_s});
      a.rows_[l.b].push_back({l.a, l.delay_s});
    }
    for (auto& r : a.rows_) {
      std::sort(r.begin(), r.end(),
                [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
    }
    return a;
  }

 private:
  std::vector<std::vector<Neighbor>> rows_;
};

inline AdjacencyMatrix adjacency(const TopologySnapshot& s) {
  return AdjacencyMatrix::from_links(s.node_count, s.links);
}

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// D^-1/2 (A+I) D^-1/2 with D the degree diagonal of A+I.
struct NormalizedAdjacency {
  SparseMatrix matrix;

  int size() const { return static_cast<int>(matrix.rows()); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }
};

inline NormalizedAdjacency normalize(const AdjacencyMatrix& a) {
  const int n = a.size();
  std::vector<double> inv_sqrt(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(a.degree(i) + 1.0);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) + 2 * a.link_count());
  for (int i = 0; i < n; ++i) {
    trips.emplace_back(i, i, inv_sqrt[i] * inv_sqrt[i]);
    for (const auto& nb : a.neighbors(i)) {
      trips.emplace_back(i, nb.node, inv_sqrt[i] * inv_sqrt[nb.node]);
    }
  }
  NormalizedAdjacency out;
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(trips.begin(), trips.end());
  out.matrix.makeCompressed();
  return out;
}

namespace detail {

inline void check_node(const AdjacencyMatrix& a, int d, const char* what) {
  if (d < 0 || d >= a.size()) {
    throw ArgumentError(std::string(what) + ": node " + std::to_string(d) +
                        " out of range [0, " + std::to_string(a.size()) + ")");
  }
}

// BFS hop counts from d, explored to at most max_depth hops; -1 beyond.
inline std::vector<int> bfs_hops(const AdjacencyMatrix& a, int d,
                                 int max_depth) {
  std::vector<int> hops(static_cast<std::size_t>(a.size()), -1);
  std::deque<int> queue{d};
  hops[d] = 0;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    if (hops[u] >= max_depth) continue;
    for (const auto& nb : a.neighbors(u)) {
      if (hops[nb.node] < 0) {
        hops[nb.node] = hops[u] + 1;
        queue.push_back(nb.node);
      }
    }
  }
  return hops;
}

}  // namespace detail

/// 1 for one-hop neighbours of d, 0.5 for two-hop, 0 otherwise (d included).
inline std::vector<double> proximity_code(const AdjacencyMatrix& a, int d) {
  detail::check_node(a, d, "proximity_code");
  const auto hops = detail::bfs_hops(a, d, 2);
  std::vector<double> code(hops.size(), 0.0);
  for (std::size_t i = 0; i < hops.size(); ++i) {
    if (hops[i] == 1) code[i] = 1.0;
    if (hops[i] == 2) code[i] = 0.5;
  }
  return code;
}

/// Column layout of the model inputs. High-order rows are the low-order
/// rows with the structural encodings spliced on the right.
struct FeatureLayout {
  static constexpr int kDestination = 0;
  static constexpr int kDegree = 1;
  static constexpr int kBearing = 2;
  static constexpr int kLow = 3;
  static constexpr int kProximity = 3;
  static constexpr int kCommonNeighbors = 4;
  static constexpr int kHigh = 5;
};

struct NodeFeatures {
  Eigen::MatrixXd low;   // n x FeatureLayout::kLow
  Eigen::MatrixXd high;  // n x FeatureLayout::kHigh

  int size() const { return static_cast<int>(low.rows()); }
};

/// Per-node inputs for destination d:
///   low  = [destination indicator, degree / max degree,
///           angular separation to d / pi (0 without positions)]
///   high = low ++ [proximity code, |N(i) & N(d)| / min(deg i, deg d)]
inline NodeFeatures build_features(const AdjacencyMatrix& a, int d,
                                   const std::vector<Vec3>& positions = {}) {
  detail::check_node(a, d, "build_features");
  const int n = a.size();
  if (!positions.empty() && static_cast<int>(positions.size()) != n) {
    throw ArgumentError("build_features: positions size != node count");
  }
  const double max_deg = std::max(1, a.max_degree());
  const auto code = proximity_code(a, d);

  std::vector<char> near_d(static_cast<std::size_t>(n), 0);
  for (const auto& nb : a.neighbors(d)) near_d[nb.node] = 1;

  NodeFeatures f;
  f.low = Eigen::MatrixXd::Zero(n, FeatureLayout::kLow);
  f.high = Eigen::MatrixXd::Zero(n, FeatureLayout::kHigh);
  Vec3 dest_dir = Vec3::Zero();
  if (!positions.empty()) dest_dir = positions[d].normalized();

  for (int i = 0; i < n; ++i) {
    f.low(i, FeatureLayout::kDestination) = (i == d) ? 1.0 : 0.0;
    f.low(i, FeatureLayout::kDegree) = a.degree(i) / max_deg;
    if (!positions.empty()) {
      const double c = std::clamp(positions[i].normalized().dot(dest_dir), -1.0, 1.0);
      f.low(i, FeatureLayout::kBearing) = std::acos(c) / std::numbers::pi;
    }

    double common = 0.0;
    if (i != d) {
      int shared = 0;
      for (const auto& nb : a.neighbors(i)) shared += near_d[nb.node];
      const int cap = std::min(a.degree(i), a.degree(d));
      if (cap > 0) common = static_cast<double>(shared) / cap;
    }
    f.high.row(i).head(FeatureLayout::kLow) = f.low.row(i);
    f.high(i, FeatureLayout::kProximity) = code[i];
    f.high(i, FeatureLayout::kCommonNeighbors) = common;
  }
  return f;
}

}  // namespace glr

#endif  // GLR_GRAPH_HPP_
