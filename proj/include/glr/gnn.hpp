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

#ifndef GLR_GNN_HPP_
#define GLR_GNN_HPP_

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glr/binary_io.hpp"
#include "glr/dataset.hpp"
#include "glr/errors.hpp"
#include "glr/graph.hpp"
#include "glr/oracle.hpp"
#include "glr/rng.hpp"

namespace glr {

using Matrix = Eigen::MatrixXd;

struct ModelShape {
  int f_low = FeatureLayout::kLow;
  int f_high = FeatureLayout::kHigh;
  int hidden = 32;

  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

/// Weights of the two graph-convolution extractors and the dense head.
/// Every node shares the same weights. Biases are 1 x width row vectors.
struct ModelParameters {
  Matrix low_w1;    // f_low x H
  Matrix low_w2;    // H x H
  Matrix high_w1;   // f_high x H
  Matrix high_w2;   // H x H
  Matrix dense_w1;  // 2H x H
  Matrix dense_b1;  // 1 x H
  Matrix dense_w2;  // H x 1
  Matrix dense_b2;  // 1 x 1

  ModelShape shape() const {
    return {static_cast<int>(low_w1.rows()), static_cast<int>(high_w1.rows()),
            static_cast<int>(low_w1.cols())};
  }

  static ModelParameters zeros(const ModelShape& s) {
    const int h = s.hidden;
    return {Matrix::Zero(s.f_low, h),  Matrix::Zero(h, h),
            Matrix::Zero(s.f_high, h), Matrix::Zero(h, h),
            Matrix::Zero(2 * h, h),    Matrix::Zero(1, h),
            Matrix::Zero(h, 1),        Matrix::Zero(1, 1)};
  }

  /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  static ModelParameters glorot(const ModelShape& s, Rng& rng) {
    ModelParameters p = zeros(s);
    p.for_each([&rng](const char*, Matrix& m, bool is_weight) {
      if (!is_weight) return;
      const double bound = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-bound, bound);
      }
    });
    return p;
  }

  /// Visits every tensor in file order.
  template <typename F>
  void for_each(F&& f) {
    f("low_w1", low_w1, true);
    f("low_w2", low_w2, true);
    f("high_w1", high_w1, true);
    f("high_w2", high_w2, true);
    f("dense_w1", dense_w1, true);
    f("dense_b1", dense_b1, false);
    f("dense_w2", dense_w2, true);
    f("dense_b2", dense_b2, false);
  }
  template <typename F>
  void for_each(F&& f) const {
    const_cast<ModelParameters*>(this)->for_each(
        [&f](const char* name, Matrix& m, bool w) { f(name, static_cast<const Matrix&>(m), w); });
  }

  /// Sum of squared weight entries (biases excluded).
  double weight_norm_sq() const {
    double s = 0.0;
    for_each([&s](const char*, const Matrix& m, bool w) {
      if (w) s += m.squaredNorm();
    });
    return s;
  }

  bool all_finite() const {
    bool ok = true;
    for_each([&ok](const char*, const Matrix& m, bool) { ok = ok && m.allFinite(); });
    return ok;
  }

  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for_each([&h](const char*, const Matrix& m, bool) {
      const auto* p = reinterpret_cast<const unsigned char*>(m.data());
      const std::size_t n = static_cast<std::size_t>(m.size()) * sizeof(double);
      for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
      }
    });
    return h;
  }
};

inline void check_dims(bool ok, const std::string& what) {
  if (!ok) throw ArgumentError("dimension mismatch: " + what);
}

inline Matrix relu(const Matrix& z) { return z.cwiseMax(0.0); }

/// sigma(Ahat * H * W), sigma = relu when `activate`, identity otherwise.
inline Matrix gcn_layer(const NormalizedAdjacency& ahat, const Matrix& h_in,
                        const Matrix& w, bool activate) {
  check_dims(ahat.size() == h_in.rows(), "gcn_layer: Ahat rows vs input rows");
  check_dims(h_in.cols() == w.rows(), "gcn_layer: input cols vs W rows");
  Matrix z = (ahat.matrix * h_in) * w;
  return activate ? relu(z) : z;
}

/// Intermediates kept by forward() for backward().
struct ForwardCache {
  std::uint64_t params_fingerprint = 0;
  const TrainingSample* sample = nullptr;

  struct Branch {
    Matrix ax;   // Ahat X
    Matrix z1;   // Ahat X W1
    Matrix a1;   // relu(z1)
    Matrix aa1;  // Ahat a1
    Matrix z2;   // Ahat a1 W2
    Matrix a2;   // relu(z2)
  };
  Branch low;
  Branch high;
  Matrix crossed;  // [low.a2 | high.a2]
  Matrix z3;
  Matrix a3;
  Eigen::VectorXd predictions;

  /// Smallest |pre-activation| over every relu; gradient checks need it
  /// away from zero.
  double min_abs_preactivation() const {
    double m = std::numeric_limits<double>::infinity();
    for (const Matrix* z : {&low.z1, &low.z2, &high.z1, &high.z2, &z3}) {
      if (z->size() > 0) m = std::min(m, z->cwiseAbs().minCoeff());
    }
    return m;
  }
};

namespace detail {

inline ForwardCache::Branch extractor(const SparseMatrix& ahat, const Matrix& x,
                                      const Matrix& w1, const Matrix& w2) {
  ForwardCache::Branch b;
  b.ax = ahat * x;
  b.z1 = b.ax * w1;
  b.a1 = relu(b.z1);
  b.aa1 = ahat * b.a1;
  b.z2 = b.aa1 * w2;
  b.a2 = relu(b.z2);
  return b;
}

}  // namespace detail

/// Two stacked graph convolutions per extractor (low-order on the raw
/// features, high-order on the spliced features), per-node concatenation
/// of both outputs, then a shared two-layer dense head giving one
/// predicted hop distance per node.
inline ForwardCache forward(const ModelParameters& p, const TrainingSample& s) {
  const int n = s.size();
  check_dims(s.adjacency && s.adjacency->size() == n, "forward: adjacency vs labels");
  check_dims(s.features.low.rows() == n && s.features.high.rows() == n,
             "forward: feature rows vs labels");
  check_dims(s.features.low.cols() == p.low_w1.rows(), "forward: low features vs low_w1");
  check_dims(s.features.high.cols() == p.high_w1.rows(), "forward: high features vs high_w1");
  check_dims(p.dense_w1.rows() == p.low_w2.cols() + p.high_w2.cols(),
             "forward: dense_w1 rows vs crossed width");

  ForwardCache c;
  c.params_fingerprint = p.fingerprint();
  c.sample = &s;
  const SparseMatrix& ahat = s.adjacency->matrix;
  c.low = detail::extractor(ahat, s.features.low, p.low_w1, p.low_w2);
  c.high = detail::extractor(ahat, s.features.high, p.high_w1, p.high_w2);
  c.crossed.resize(n, c.low.a2.cols() + c.high.a2.cols());
  c.crossed << c.low.a2, c.high.a2;
  c.z3 = (c.crossed * p.dense_w1).rowwise() + p.dense_b1.row(0);
  c.a3 = relu(c.z3);
  c.predictions = (c.a3 * p.dense_w2).col(0).array() + p.dense_b2(0, 0);
  return c;
}

struct LossParts {
  double data = 0.0;
  double regularization = 0.0;
  double total() const { return data + regularization; }
};

/// Masked mean squared error over reachable nodes plus beta * sum of
/// squared weights.
inline LossParts loss_parts(const Eigen::VectorXd& predictions,
                            const std::vector<double>& labels,
                            const std::vector<double>& mask,
                            const ModelParameters& p, double beta) {
  check_dims(predictions.size() == static_cast<Eigen::Index>(labels.size()) &&
                 labels.size() == mask.size(),
             "loss: predictions/labels/mask lengths");
  double sum = 0.0, n_eff = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (mask[i] == 0.0) continue;
    const double r = predictions[static_cast<Eigen::Index>(i)] - labels[i];
    sum += r * r;
    n_eff += 1.0;
  }
  if (n_eff == 0.0) throw DegenerateSampleError("loss: no node has mask 1");
  return {sum / n_eff, beta * p.weight_norm_sq()};
}

inline double loss(const Eigen::VectorXd& predictions, const std::vector<double>& labels,
                   const std::vector<double>& mask, const ModelParameters& p,
                   double beta) {
  return loss_parts(predictions, labels, mask, p, beta).total();
}

/// Exact reverse-mode gradient of loss() at the point recorded in `cache`.
inline ModelParameters backward(const ModelParameters& p, const TrainingSample& s,
                                const ForwardCache& c, double beta) {
  if (c.sample != &s || c.params_fingerprint != p.fingerprint()) {
    throw ContractError("backward: cache does not belong to these parameters/sample");
  }
  const int n = s.size();
  double n_eff = 0.0;
  for (double m : s.mask) n_eff += m != 0.0 ? 1.0 : 0.0;
  if (n_eff == 0.0) throw DegenerateSampleError("backward: no node has mask 1");

  Eigen::VectorXd dy(n);
  for (int i = 0; i < n; ++i) {
    dy[i] = s.mask[i] != 0.0 ? 2.0 * (c.predictions[i] - s.labels[i]) / n_eff : 0.0;
  }

  ModelParameters g = ModelParameters::zeros(p.shape());
  g.dense_w2 = c.a3.transpose() * dy;
  g.dense_b2(0, 0) = dy.sum();
  Matrix dz3 = dy * p.dense_w2.transpose();
  dz3.array() *= (c.z3.array() > 0.0).cast<double>();
  g.dense_w1 = c.crossed.transpose() * dz3;
  g.dense_b1 = dz3.colwise().sum();
  const Matrix dcrossed = dz3 * p.dense_w1.transpose();

  const SparseMatrix& ahat = s.adjacency->matrix;  // symmetric
  auto branch = [&ahat](const ForwardCache::Branch& b, Matrix da2, const Matrix& w2,
                        Matrix& gw1, Matrix& gw2) {
    da2.array() *= (b.z2.array() > 0.0).cast<double>();
    gw2 = b.aa1.transpose() * da2;
    Matrix da1 = ahat * (da2 * w2.transpose());
    da1.array() *= (b.z1.array() > 0.0).cast<double>();
    gw1 = b.ax.transpose() * da1;
  };
  const Eigen::Index h_low = c.low.a2.cols();
  branch(c.low, dcrossed.leftCols(h_low), p.low_w2, g.low_w1, g.low_w2);
  branch(c.high, dcrossed.rightCols(dcrossed.cols() - h_low), p.high_w2, g.high_w1,
         g.high_w2);

  if (beta != 0.0) {
    g.low_w1 += 2.0 * beta * p.low_w1;
    g.low_w2 += 2.0 * beta * p.low_w2;
    g.high_w1 += 2.0 * beta * p.high_w1;
    g.high_w2 += 2.0 * beta * p.high_w2;
    g.dense_w1 += 2.0 * beta * p.dense_w1;
    g.dense_w2 += 2.0 * beta * p.dense_w2;
  }
  return g;
}

/// Predicted distance field for destination d on topology `a`.
inline DistanceField infer(const ModelParameters& p, const AdjacencyMatrix& a, int d,
                           const std::vector<Vec3>& positions = {}) {
  TrainingSample s;
  s.adjacency = std::make_shared<const NormalizedAdjacency>(normalize(a));
  s.features = build_features(a, d, positions);
  s.labels.assign(static_cast<std::size_t>(a.size()), 0.0);
  s.mask.assign(static_cast<std::size_t>(a.size()), 0.0);
  s.destination = d;
  const ForwardCache c = forward(p, s);
  DistanceField f;
  f.destination = d;
  f.source = DistanceField::Source::kPredicted;
  f.values.assign(c.predictions.data(), c.predictions.data() + c.predictions.size());
  return f;
}

inline constexpr char kParamsMagic[8] = {'G', 'L', 'R', 'P', 'A', 'R', 'A', 'M'};
inline constexpr std::uint32_t kParamsVersion = 1;

// Layout (little-endian) is documented in docs/FORMATS.md.
inline void save_params(const ModelParameters& p, const std::string& path) {
  io::Writer w(path);
  w.bytes(kParamsMagic, sizeof kParamsMagic);
  w.u32(kParamsVersion);
  const ModelShape s = p.shape();
  w.u32(static_cast<std::uint32_t>(s.f_low));
  w.u32(static_cast<std::uint32_t>(s.f_high));
  w.u32(static_cast<std::uint32_t>(s.hidden));
  p.for_each([&w](const char*, const Matrix& m, bool) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) w.f64(m(i, j));
    }
  });
  w.close();
}

inline ModelParameters load_params(const std::string& path,
                                   std::optional<ModelShape> expected = std::nullopt) {
  io::Reader r(path);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kParamsMagic, sizeof magic) != 0) {
    throw FormatError(path + ": not a parameter file (bad magic)");
  }
  const auto version = r.u32();
  if (version != kParamsVersion) {
    throw FormatError(path + ": expected format version " + std::to_string(kParamsVersion) +
                      ", found " + std::to_string(version));
  }
  ModelShape s;
  s.f_low = static_cast<int>(r.u32());
  s.f_high = static_cast<int>(r.u32());
  s.hidden = static_cast<int>(r.u32());
  if (s.f_low <= 0 || s.f_high <= 0 || s.hidden <= 0 || s.hidden > 4096) {
    throw FormatError(path + ": implausible shape");
  }
  if (expected && !(*expected == s)) {
    throw FormatError(path + ": shape mismatch, expected F_low=" +
                      std::to_string(expected->f_low) + " F_high=" +
                      std::to_string(expected->f_high) + " H=" +
                      std::to_string(expected->hidden) + ", found F_low=" +
                      std::to_string(s.f_low) + " F_high=" + std::to_string(s.f_high) +
                      " H=" + std::to_string(s.hidden));
  }
  ModelParameters p = ModelParameters::zeros(s);
  p.for_each([&r](const char*, Matrix& m, bool) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = r.f64();
    }
  });
  r.expect_end();
  return p;
}

}  // namespace glr

#endif  // GLR_GNN_HPP_
