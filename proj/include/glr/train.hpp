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

#ifndef GLR_TRAIN_HPP_
#define GLR_TRAIN_HPP_

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "glr/dataset.hpp"
#include "glr/errors.hpp"
#include "glr/gnn.hpp"
#include "glr/rng.hpp"

namespace glr {

enum class Optimizer { kAdam, kSgd };

struct Hyperparameters {
  double learning_rate = 1e-3;
  double beta = 1e-4;  // L2 weight-decay coefficient
  int epochs = 200;
  int batch = 1;  // samples (graphs) per optimizer step
  int early_stop_patience = 20;
  int hidden = 32;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::kAdam;

  void validate() const {
    if (!(learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
    if (!(beta >= 0)) throw ConfigError("beta must be >= 0");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch < 1) throw ConfigError("batch must be >= 1");
    if (early_stop_patience < 1) throw ConfigError("early_stop_patience must be >= 1");
    if (hidden < 1) throw ConfigError("hidden must be >= 1");
  }
};

struct TrainReport {
  std::vector<double> train_loss;       // mean data loss seen during the epoch
  std::vector<double> validation_loss;  // NaN when there is no validation split
  int best_epoch = 0;                   // 1-based
  double seconds = 0.0;

  int epochs_run() const { return static_cast<int>(train_loss.size()); }
};

struct TrainResult {
  ModelParameters params;
  TrainReport report;
};

/// Adam with bias correction, one moment pair per tensor.
class AdamState {
 public:
  explicit AdamState(const ModelShape& s)
      : m_(ModelParameters::zeros(s)), v_(ModelParameters::zeros(s)) {}

  void step(ModelParameters& p, const ModelParameters& g, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    std::vector<Matrix*> ps, ms, vs;
    std::vector<const Matrix*> gs;
    p.for_each([&](const char*, Matrix& x, bool) { ps.push_back(&x); });
    m_.for_each([&](const char*, Matrix& x, bool) { ms.push_back(&x); });
    v_.for_each([&](const char*, Matrix& x, bool) { vs.push_back(&x); });
    g.for_each([&](const char*, const Matrix& x, bool) { gs.push_back(&x); });
    for (std::size_t k = 0; k < ps.size(); ++k) {
      auto m = ms[k]->array();
      auto v = vs[k]->array();
      const auto gr = gs[k]->array();
      m = kBeta1 * m + (1.0 - kBeta1) * gr;
      v = kBeta2 * v + (1.0 - kBeta2) * gr.square();
      ps[k]->array() -= lr * (m / c1) / ((v / c2).sqrt() + kEpsilon);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;
  ModelParameters m_;
  ModelParameters v_;
  int t_ = 0;
};

namespace detail {

inline void axpy(ModelParameters& acc, const ModelParameters& g, double scale) {
  std::vector<Matrix*> as;
  std::vector<const Matrix*> gs;
  acc.for_each([&](const char*, Matrix& x, bool) { as.push_back(&x); });
  g.for_each([&](const char*, const Matrix& x, bool) { gs.push_back(&x); });
  for (std::size_t k = 0; k < as.size(); ++k) *as[k] += scale * *gs[k];
}

inline double mean_data_loss(const ModelParameters& p, const Dataset& ds,
                             const std::vector<int>& idx) {
  double s = 0.0;
  for (int i : idx) {
    const auto& smp = ds.samples[i];
    s += loss_parts(forward(p, smp).predictions, smp.labels, smp.mask, p, 0.0).data;
  }
  return s / static_cast<double>(idx.size());
}

}  // namespace detail

/// Called after every epoch with (epoch, train loss, validation loss).
using EpochCallback = std::function<void(int, double, double)>;

/// Seeded Glorot init, shuffled passes over the training split, Adam (or
/// plain gradient descent) steps on the regularised loss. Keeps the
/// parameters with the lowest validation loss (training loss when the
/// validation split is empty) and stops after `early_stop_patience`
/// epochs without improvement.
inline TrainResult train(const Dataset& ds, const Hyperparameters& hp,
                         const EpochCallback& on_epoch = nullptr) {
  hp.validate();
  if (ds.train.empty()) throw ArgumentError("train: training split is empty");
  const auto t0 = std::chrono::steady_clock::now();

  Rng init_rng = Rng::stream(hp.seed, "init");
  ModelParameters params = ModelParameters::glorot(ModelShape{FeatureLayout::kLow,
                                                              FeatureLayout::kHigh,
                                                              hp.hidden},
                                                   init_rng);
  AdamState adam(params.shape());
  Rng shuffle_rng = Rng::stream(hp.seed, "shuffle");

  TrainResult result{params, {}};
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  std::vector<int> order = ds.train;

  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    ModelParameters grad = ModelParameters::zeros(params.shape());
    int in_batch = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const TrainingSample& s = ds.samples[order[k]];
      const ForwardCache cache = forward(params, s);
      const LossParts l = loss_parts(cache.predictions, s.labels, s.mask, params, hp.beta);
      if (!std::isfinite(l.total())) {
        throw DivergenceError(epoch, "train: non-finite loss at epoch " +
                                         std::to_string(epoch));
      }
      epoch_loss += l.data;
      detail::axpy(grad, backward(params, s, cache, hp.beta), 1.0);
      if (++in_batch == hp.batch || k + 1 == order.size()) {
        const double scale = 1.0 / in_batch;
        grad.for_each([scale](const char*, Matrix& m, bool) { m *= scale; });
        if (hp.optimizer == Optimizer::kAdam) {
          adam.step(params, grad, hp.learning_rate);
        } else {
          detail::axpy(params, grad, -hp.learning_rate);
        }
        grad = ModelParameters::zeros(params.shape());
        in_batch = 0;
      }
    }
    epoch_loss /= static_cast<double>(order.size());
    if (!params.all_finite()) {
      throw DivergenceError(epoch, "train: parameters diverged at epoch " +
                                       std::to_string(epoch));
    }

    const double val = ds.validation.empty()
                           ? std::numeric_limits<double>::quiet_NaN()
                           : detail::mean_data_loss(params, ds, ds.validation);
    result.report.train_loss.push_back(epoch_loss);
    result.report.validation_loss.push_back(val);
    if (on_epoch) on_epoch(epoch, epoch_loss, val);

    const double criterion = ds.validation.empty() ? epoch_loss : val;
    if (criterion < best) {
      best = criterion;
      result.params = params;
      result.report.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= hp.early_stop_patience) {
      break;
    }
  }
  result.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace glr

#endif  // GLR_TRAIN_HPP_
