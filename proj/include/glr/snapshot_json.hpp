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

#ifndef GLR_SNAPSHOT_JSON_HPP_
#define GLR_SNAPSHOT_JSON_HPP_

#include <string>

#include <nlohmann/json.hpp>

#include "glr/constellation.hpp"

namespace glr {

/// {"time": t, "n": N, "links": [[i, j, delay_s], ...], "positions": [[x,y,z], ...]}
/// "positions" is optional on input.
inline nlohmann::json snapshot_to_json(const TopologySnapshot& s) {
  nlohmann::json links = nlohmann::json::array();
  for (const auto& l : s.links) links.push_back({l.a, l.b, l.delay_s});
  nlohmann::json j = {{"time", s.time},
                      {"n", s.node_count},
                      {"policy", to_string(s.policy)},
                      {"links", std::move(links)}};
  if (!s.positions.empty()) {
    nlohmann::json pos = nlohmann::json::array();
    for (const auto& p : s.positions) pos.push_back({p.x(), p.y(), p.z()});
    j["positions"] = std::move(pos);
  }
  return j;
}

inline TopologySnapshot snapshot_from_json(const nlohmann::json& j) {
  std::vector<Link> links;
  for (const auto& l : j.at("links")) {
    links.push_back({l.at(0).get<int>(), l.at(1).get<int>(), l.at(2).get<double>()});
  }
  TopologySnapshot s = TopologySnapshot::from_links(j.at("n").get<int>(), std::move(links));
  s.time = j.at("time").get<double>();
  if (j.contains("policy")) s.policy = parse_isl_policy(j.at("policy").get<std::string>());
  if (j.contains("positions")) {
    for (const auto& p : j.at("positions")) {
      s.positions.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(),
                               p.at(2).get<double>());
    }
  }
  return s;
}

}  // namespace glr

#endif  // GLR_SNAPSHOT_JSON_HPP_
