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

#ifndef GLR_GRADCHECK_HPP_
#define GLR_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "glr/constellation.hpp"
#include "glr/gnn.hpp"
#include "glr/rng.hpp"

namespace glr {

/// Random connected-ish sample with n nodes, random positions and random
/// labels; used by the finite-difference suite.
inline TrainingSample random_sample(Rng& rng, int n, double edge_prob = 0.35) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) edges.emplace_back(static_cast<int>(rng.index(i)), i);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < edge_prob) edges.emplace_back(i, j);
    }
  }
  auto snap = TopologySnapshot::from_edges(n, edges);
  for (int i = 0; i < n; ++i) {
    snap.positions.push_back(
        Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized() * 7421.0);
  }
  const AdjacencyMatrix a = adjacency(snap);
  const int d = static_cast<int>(rng.index(static_cast<std::uint64_t>(n)));
  TrainingSample s = make_sample(a, std::make_shared<const NormalizedAdjacency>(normalize(a)),
                                 d, snap.positions);
  for (auto& y : s.labels) y += rng.uniform(-0.5, 0.5);
  return s;
}

struct GradCheckReport {
  std::map<std::string, double> max_relative_error;  // per tensor
  double worst = 0.0;
  int samples = 0;
  bool passed(double tolerance) const { return worst < tolerance; }
};

/// Element-wise relative error |a - n| / max(|a| + |n|, floor); the floor
/// keeps round-off in near-zero gradients from dominating.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max(std::abs(analytic) + std::abs(numeric), floor);
}

/// Optional hook that may alter analytic gradients before comparison
/// (used to verify that the checker catches wrong gradients).
using GradientTamper = std::function<void(ModelParameters&)>;

/// Central differences (L(theta+h) - L(theta-h)) / 2h on every entry of every
/// tensor, over `samples` random graphs with n in [2, max_nodes]. Draws whose
/// relu pre-activations come within `kink_margin` of zero are redrawn, since
/// the loss is not differentiable there.
inline GradCheckReport gradient_check(std::uint64_t seed, int samples = 10, int max_nodes = 10,
                                      double h = 1e-5, double beta = 1e-3,
                                      const GradientTamper& tamper = nullptr,
                                      int hidden = 32, double kink_margin = 1e-4) {
  GradCheckReport report;
  Rng rng = Rng::stream(seed, "gradcheck");
  const ModelShape shape{FeatureLayout::kLow, FeatureLayout::kHigh, hidden};
  while (report.samples < samples) {
    const int n = 2 + static_cast<int>(rng.index(static_cast<std::uint64_t>(max_nodes - 1)));
    TrainingSample s = random_sample(rng, n);
    ModelParameters p = ModelParameters::glorot(shape, rng);
    p.dense_b1.setConstant(0.1);
    p.dense_b2(0, 0) = 0.3;
    const ForwardCache cache = forward(p, s);
    if (cache.min_abs_preactivation() < kink_margin) continue;
    ++report.samples;

    ModelParameters analytic = backward(p, s, cache, beta);
    if (tamper) tamper(analytic);

    std::vector<std::pair<std::string, Matrix*>> params, grads;
    p.for_each([&](const char* name, Matrix& m, bool) { params.emplace_back(name, &m); });
    analytic.for_each([&](const char* name, Matrix& m, bool) { grads.emplace_back(name, &m); });
    auto eval = [&] { return loss(forward(p, s).predictions, s.labels, s.mask, p, beta); };
    for (std::size_t k = 0; k < params.size(); ++k) {
      Matrix& m = *params[k].second;
      double& worst = report.max_relative_error[params[k].first];
      for (Eigen::Index i = 0; i < m.size(); ++i) {
        const double saved = m.data()[i];
        m.data()[i] = saved + h;
        const double up = eval();
        m.data()[i] = saved - h;
        const double down = eval();
        m.data()[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        worst = std::max(worst, relative_error(grads[k].second->data()[i], numeric));
      }
      report.worst = std::max(report.worst, worst);
    }
  }
  return report;
}

}  // namespace glr

#endif  // GLR_GRADCHECK_HPP_
