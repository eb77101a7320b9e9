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

#ifndef GLR_CONSTELLATION_HPP_
#define GLR_CONSTELLATION_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "glr/errors.hpp"

namespace glr {

using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLightKmPerS = 299792.458;
inline constexpr double kDegToRad = std::numbers::pi / 180.0;

enum class IslPolicy {
  // Two intra-plane ring neighbours plus the nearest satellite in each
  // adjacent plane, then filtered by range and line of sight.
  kGridCapped,
  // Every pair within range and in line of sight.
  kRangeGraph,
};

inline const char* to_string(IslPolicy p) {
  return p == IslPolicy::kGridCapped ? "grid-capped" : "range-graph";
}

inline IslPolicy parse_isl_policy(const std::string& s) {
  if (s == "grid-capped" || s == "+grid-capped" || s == "grid") {
    return IslPolicy::kGridCapped;
  }
  if (s == "range-graph" || s == "range") return IslPolicy::kRangeGraph;
  throw ConfigError("unknown isl_policy '" + s +
                    "' (expected grid-capped or range-graph)");
}

struct ConstellationConfig {
  int num_planes = 12;
  int sats_per_plane = 11;
  double altitude_km = 1050.0;
  double inclination_deg = 53.0;
  double eccentricity = 0.0;
  int phase_factor = 0;
  double comm_range_km = 3500.0;
  double earth_radius_km = 6371.0;
  double mu = 398600.4418;  // km^3/s^2
  double epoch_s = 0.0;

  int size() const { return num_planes * sats_per_plane; }
  double semi_major_axis() const { return earth_radius_km + altitude_km; }
  double period() const {
    const double a = semi_major_axis();
    return 2.0 * std::numbers::pi * std::sqrt(a * a * a / mu);
  }

  void validate() const {
    if (num_planes < 1) throw ConfigError("num_planes must be >= 1");
    if (sats_per_plane < 1) throw ConfigError("sats_per_plane must be >= 1");
    if (!(altitude_km > 0)) throw ConfigError("altitude must be > 0 km");
    if (!(comm_range_km > 0)) throw ConfigError("comm_range must be > 0 km");
    if (phase_factor < 0 || phase_factor >= num_planes) {
      throw ConfigError("phase_factor must satisfy 0 <= F < num_planes");
    }
    if (eccentricity != 0.0) {
      throw ConfigError("eccentricity must be 0 (circular orbits only)");
    }
    if (!(earth_radius_km > 0)) throw ConfigError("earth_radius must be > 0");
    if (!(mu > 0)) throw ConfigError("mu must be > 0");
  }
};

struct SatelliteState {
  int sat_id = 0;
  int plane_index = 0;
  int slot_index = 0;
  double raan_rad = 0.0;
  double arg_latitude_rad = 0.0;
  Vec3 position = Vec3::Zero();  // km, Earth-centred inertial
};

namespace detail {

inline Vec3 orbit_position(double radius, double raan, double inclination,
                           double arg_latitude) {
  const double cu = std::cos(arg_latitude), su = std::sin(arg_latitude);
  const double co = std::cos(raan), so = std::sin(raan);
  const double ci = std::cos(inclination), si = std::sin(inclination);
  return radius * Vec3(co * cu - so * su * ci, so * cu + co * su * ci, su * si);
}

}  // namespace detail

/// Walker-delta layout: plane p at RAAN p*360/P, slot s at argument of
/// latitude s*360/S + p*F*360/(P*S).
inline std::vector<SatelliteState> build_walker(const ConstellationConfig& c) {
  c.validate();
  const double two_pi = 2.0 * std::numbers::pi;
  const double incl = c.inclination_deg * kDegToRad;
  const double a = c.semi_major_axis();
  const int total = c.size();
  std::vector<SatelliteState> states;
  states.reserve(static_cast<std::size_t>(total));
  for (int p = 0; p < c.num_planes; ++p) {
    const double raan = p * two_pi / c.num_planes;
    for (int s = 0; s < c.sats_per_plane; ++s) {
      SatelliteState st;
      st.sat_id = p * c.sats_per_plane + s;
      st.plane_index = p;
      st.slot_index = s;
      st.raan_rad = raan;
      st.arg_latitude_rad = s * two_pi / c.sats_per_plane +
                            p * c.phase_factor * two_pi / total;
      st.position = detail::orbit_position(a, raan, incl, st.arg_latitude_rad);
      states.push_back(st);
    }
  }
  return states;
}

/// Circular two-body motion: argument of latitude advances 2*pi*t/T.
inline std::vector<SatelliteState> propagate(
    const std::vector<SatelliteState>& states, const ConstellationConfig& c,
    double t) {
  if (t < 0) throw ArgumentError("propagate: t must be >= 0");
  const double two_pi = 2.0 * std::numbers::pi;
  const double advance = std::fmod(two_pi * t / c.period(), two_pi);
  const double incl = c.inclination_deg * kDegToRad;
  const double a = c.semi_major_axis();
  std::vector<SatelliteState> out = states;
  for (auto& st : out) {
    st.arg_latitude_rad = std::fmod(st.arg_latitude_rad + advance, two_pi);
    st.position =
        detail::orbit_position(a, st.raan_rad, incl, st.arg_latitude_rad);
  }
  return out;
}

inline double inter_sat_distance(const SatelliteState& a,
                                 const SatelliteState& b) {
  return (a.position - b.position).norm();
}

/// True iff the segment between the two satellites stays outside the
/// sphere of radius earth_radius centred at the origin.
inline bool line_of_sight(const Vec3& a, const Vec3& b, double earth_radius) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(-a.dot(ab) / len2, 0.0, 1.0);
  return (a + t * ab).norm() > earth_radius;
}

inline bool line_of_sight(const SatelliteState& a, const SatelliteState& b,
                          double earth_radius) {
  return line_of_sight(a.position, b.position, earth_radius);
}

struct Link {
  int a = 0;  // a < b
  int b = 0;
  double delay_s = 0.0;

  friend bool operator==(const Link&, const Link&) = default;
};

/// Network graph frozen at one instant. Links are undirected, stored once
/// with a < b and sorted.
struct TopologySnapshot {
  double time = 0.0;
  int node_count = 0;
  std::vector<Link> links;
  // Satellite positions at `time`; empty for synthetic graphs.
  std::vector<Vec3> positions;
  // Nodes with no link (permitted, flagged).
  std::vector<int> isolated;
  IslPolicy policy = IslPolicy::kGridCapped;

  /// Builds a snapshot from an arbitrary undirected edge list; used for
  /// synthetic graphs in tests and by loaders.
  static TopologySnapshot from_edges(int n,
                                     std::vector<std::pair<int, int>> edges,
                                     double delay_s = 1e-3) {
    std::vector<Link> links;
    links.reserve(edges.size());
    for (auto [i, j] : edges) links.push_back({i, j, delay_s});
    return from_links(n, std::move(links));
  }

  static TopologySnapshot from_links(int n, std::vector<Link> links) {
    TopologySnapshot s;
    s.node_count = n;
    for (auto& l : links) {
      if (l.a == l.b) throw ArgumentError("self-link on node " + std::to_string(l.a));
      if (l.a < 0 || l.b < 0 || l.a >= n || l.b >= n) {
        throw ArgumentError("link endpoint out of range");
      }
      if (!(l.delay_s > 0)) throw ArgumentError("link delay must be > 0");
      if (l.a > l.b) std::swap(l.a, l.b);
    }
    std::sort(links.begin(), links.end(), [](const Link& x, const Link& y) {
      return std::pair(x.a, x.b) < std::pair(y.a, y.b);
    });
    links.erase(std::unique(links.begin(), links.end(),
                            [](const Link& x, const Link& y) {
                              return x.a == y.a && x.b == y.b;
                            }),
                links.end());
    s.links = std::move(links);
    s.refresh_isolated();
    return s;
  }

  void refresh_isolated() {
    std::vector<char> seen(static_cast<std::size_t>(node_count), 0);
    for (const auto& l : links) seen[l.a] = seen[l.b] = 1;
    isolated.clear();
    for (int i = 0; i < node_count; ++i) {
      if (!seen[i]) isolated.push_back(i);
    }
  }
};

/// Derives the ISL topology at time t from states already propagated to t.
inline TopologySnapshot snapshot(const std::vector<SatelliteState>& states,
                                 const ConstellationConfig& c, double t,
                                 IslPolicy policy) {
  const int n = static_cast<int>(states.size());
  auto feasible = [&](int i, int j) {
    return inter_sat_distance(states[i], states[j]) <= c.comm_range_km &&
           line_of_sight(states[i], states[j], c.earth_radius_km);
  };

  std::vector<std::pair<int, int>> proposals;
  if (policy == IslPolicy::kRangeGraph) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) proposals.emplace_back(i, j);
    }
  } else {
    const int P = c.num_planes, S = c.sats_per_plane;
    auto id = [S](int p, int s) { return p * S + s; };
    for (const auto& st : states) {
      const int p = st.plane_index, s = st.slot_index;
      if (S > 1) {
        proposals.emplace_back(st.sat_id, id(p, (s + 1) % S));
        proposals.emplace_back(st.sat_id, id(p, (s + S - 1) % S));
      }
      std::vector<int> adjacent_planes;
      if (P > 1) adjacent_planes.push_back((p + 1) % P);
      if (P > 2) adjacent_planes.push_back((p + P - 1) % P);
      for (int q : adjacent_planes) {
        int best = -1;
        double best_d = 0.0;
        for (int k = 0; k < S; ++k) {
          const double d = inter_sat_distance(st, states[id(q, k)]);
          if (best < 0 || d < best_d) {
            best = id(q, k);
            best_d = d;
          }
        }
        proposals.emplace_back(st.sat_id, best);
      }
    }
  }

  std::vector<Link> links;
  for (auto [i, j] : proposals) {
    if (i == j || !feasible(i, j)) continue;
    links.push_back({std::min(i, j), std::max(i, j),
                     inter_sat_distance(states[i], states[j]) /
                         kSpeedOfLightKmPerS});
  }
  TopologySnapshot snap = TopologySnapshot::from_links(n, std::move(links));
  snap.time = t;
  snap.policy = policy;
  snap.positions.reserve(states.size());
  for (const auto& st : states) snap.positions.push_back(st.position);
  return snap;
}

/// Convenience: build, propagate to `t` and snapshot.
inline TopologySnapshot snapshot_at(const ConstellationConfig& c, double t,
                                    IslPolicy policy) {
  return snapshot(propagate(build_walker(c), c, t), c, t, policy);
}

}  // namespace glr

#endif  // GLR_CONSTELLATION_HPP_
