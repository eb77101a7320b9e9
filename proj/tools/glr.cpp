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

// glr: constellation export, dataset build, training, evaluation and
// gradient checking from one entry point.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "glr/config.hpp"
#include "glr/dataset.hpp"
#include "glr/gnn.hpp"
#include "glr/gradcheck.hpp"
#include "glr/oracle.hpp"
#include "glr/sim.hpp"
#include "glr/snapshot_json.hpp"
#include "glr/train.hpp"

#ifndef GLR_VERSION
#define GLR_VERSION "dev"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> sets;  // key=value overrides
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string manifest_path;
};

// Flag -> config key overrides collected per subcommand.
struct Overrides {
  std::list<std::pair<std::string, std::optional<std::string>>> flags;

  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    flags.emplace_back(key, std::nullopt);
    app->add_option(flag, flags.back().second, help);
  }
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

glr::RunConfig resolve(const Common& common, const Overrides& ov) {
  glr::KeyValueFile kv;
  if (!common.config_path.empty()) kv = glr::KeyValueFile::load(common.config_path);
  for (const auto& s : common.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw glr::ConfigError("--set expects key=value, got '" + s + "'");
    kv.set(s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [key, value] : ov.flags) {
    if (value) kv.set(key, *value);
  }
  if (common.seed) kv.set("seed", std::to_string(*common.seed));
  if (common.jobs) kv.set("jobs", std::to_string(*common.jobs));
  glr::RunConfig rc;
  rc.apply(kv);
  rc.validate();
  return rc;
}

class Manifest {
 public:
  Manifest(std::string subcommand, const glr::RunConfig& rc)
      : j_({{"subcommand", std::move(subcommand)},
            {"tool_version", GLR_VERSION},
            {"seed", rc.seed},
            {"config", rc.to_json()},
            {"artifacts", json::object()},
            {"started_at", utc_now()}}) {}

  void artifact(const std::string& role, const std::string& path) {
    j_["artifacts"][role] = path;
  }
  json& extra() { return j_; }

  void write(const std::string& path) {
    j_["finished_at"] = utc_now();
    for (const auto& [role, p] : j_["artifacts"].items()) {
      if (!fs::exists(p.get<std::string>())) {
        throw std::runtime_error("artifact " + role + " missing: " + p.get<std::string>());
      }
    }
    std::ofstream out(path);
    out << j_.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write manifest " + path);
  }

 private:
  json j_;
};

std::string manifest_for(const Common& common, const std::string& primary) {
  return common.manifest_path.empty() ? primary + ".manifest.json" : common.manifest_path;
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

int cmd_constellation(const Common& common, const Overrides& ov, const std::string& out_dir) {
  const glr::RunConfig rc = resolve(common, ov);
  fs::create_directories(out_dir);
  Manifest manifest("constellation", rc);
  const auto epoch_states = glr::build_walker(rc.constellation);
  const auto times = rc.snapshot_times();
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto snap = glr::snapshot(glr::propagate(epoch_states, rc.constellation, times[k]),
                                    rc.constellation, times[k], rc.policy);
    std::ostringstream name;
    name << "snapshot_" << std::setw(4) << std::setfill('0') << k << ".json";
    const std::string path = (fs::path(out_dir) / name.str()).string();
    std::ofstream out(path);
    out << glr::snapshot_to_json(snap).dump() << '\n';
    if (!out) throw std::runtime_error("cannot write " + path);
    manifest.artifact(name.str(), path);
    std::cout << "t=" << times[k] << "s nodes=" << snap.node_count
              << " links=" << snap.links.size() << " isolated=" << snap.isolated.size() << '\n';
  }
  manifest.write(manifest_for(common, (fs::path(out_dir) / "constellation").string()));
  return 0;
}

// Independent BFS over the stored edge list.
int count_label_mismatches(const glr::Dataset& ds) {
  int bad = 0;
  for (const auto& s : ds.samples) {
    const auto& snap = ds.snapshots[s.snapshot_index];
    std::vector<std::vector<int>> nbr(snap.node_count);
    for (const auto& l : snap.links) {
      nbr[l.a].push_back(l.b);
      nbr[l.b].push_back(l.a);
    }
    std::vector<int> dist(snap.node_count, -1);
    std::vector<int> queue{s.destination};
    dist[s.destination] = 0;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      for (int v : nbr[queue[q]]) {
        if (dist[v] < 0) {
          dist[v] = dist[queue[q]] + 1;
          queue.push_back(v);
        }
      }
    }
    for (int i = 0; i < snap.node_count; ++i) {
      const bool reachable = dist[i] >= 0;
      if (static_cast<bool>(s.mask[i]) != reachable) ++bad;
      else if (reachable && s.labels[i] != dist[i]) ++bad;
    }
  }
  return bad;
}

int cmd_dataset(const Common& common, const Overrides& ov, const std::string& out_path) {
  const glr::RunConfig rc = resolve(common, ov);
  ensure_parent(out_path);
  Manifest manifest("dataset", rc);
  const auto ds = glr::build_dataset(rc.constellation, rc.policy, rc.snapshot_times(),
                                     rc.destinations_per_snapshot, rc.seed);
  glr::save_dataset(ds, out_path);
  const auto reloaded = glr::load_dataset(out_path);
  const int mismatches = count_label_mismatches(reloaded);
  manifest.artifact("dataset", out_path);
  manifest.extra()["samples"] = ds.samples.size();
  manifest.extra()["train_samples"] = ds.train.size();
  manifest.extra()["validation_samples"] = ds.validation.size();
  manifest.extra()["skipped_samples"] = ds.skipped;
  manifest.extra()["label_mismatches"] = mismatches;
  std::cout << "samples=" << ds.samples.size() << " train=" << ds.train.size()
            << " validation=" << ds.validation.size() << " skipped=" << ds.skipped
            << " label_mismatches=" << mismatches << '\n';
  if (mismatches != 0) {
    std::cerr << "error: reloaded dataset disagrees with BFS labels\n";
    return 1;
  }
  manifest.write(manifest_for(common, out_path));
  return 0;
}

int cmd_train(const Common& common, const Overrides& ov, const std::string& dataset_path,
              const std::string& out_path, std::string epoch_csv) {
  const glr::RunConfig rc = resolve(common, ov);
  if (!fs::exists(dataset_path)) throw glr::ConfigError("dataset file not found: " + dataset_path);
  const auto ds = glr::load_dataset(dataset_path);
  ensure_parent(out_path);
  if (epoch_csv.empty()) epoch_csv = out_path + ".epochs.csv";
  ensure_parent(epoch_csv);
  Manifest manifest("train", rc);

  std::ofstream csv(epoch_csv);
  csv << "epoch,train_loss,validation_loss\n" << std::setprecision(17);
  auto on_epoch = [&](int epoch, double tl, double vl) {
    csv << epoch << ',' << tl << ',';
    if (std::isfinite(vl)) csv << vl;
    csv << '\n';
  };
  const auto result = glr::train(ds, rc.hyper, on_epoch);
  csv.close();
  if (!csv) throw std::runtime_error("cannot write " + epoch_csv);
  glr::save_params(result.params, out_path);

  const auto& r = result.report;
  const double weight_norm = result.params.weight_norm_sq();
  manifest.artifact("dataset", dataset_path);
  manifest.artifact("model", out_path);
  manifest.artifact("epochs_csv", epoch_csv);
  manifest.extra()["epochs_run"] = r.epochs_run();
  manifest.extra()["best_epoch"] = r.best_epoch;
  manifest.extra()["initial_train_loss"] = r.train_loss.front();
  manifest.extra()["final_train_loss"] = r.train_loss.back();
  manifest.extra()["weight_norm_sq"] = weight_norm;
  manifest.extra()["train_seconds"] = r.seconds;
  std::cout << std::setprecision(6) << "epochs=" << r.epochs_run()
            << " best_epoch=" << r.best_epoch << " initial_train_loss=" << r.train_loss.front()
            << " final_train_loss=" << r.train_loss.back()
            << " weight_norm_sq=" << weight_norm << " seconds=" << r.seconds << '\n';
  manifest.write(manifest_for(common, out_path));
  return 0;
}

int cmd_eval(const Common& common, const Overrides& ov, const std::string& model_path,
             const std::string& out_path) {
  const glr::RunConfig rc = resolve(common, ov);
  std::optional<glr::ModelParameters> params;
  bool wants_glr = false;
  for (const auto& a : rc.algorithms) wants_glr |= glr::parse_algorithm(a) == glr::Algorithm::kGlr;
  if (wants_glr) {
    if (model_path.empty()) throw glr::ConfigError("GLR selected but --model was not given");
    params = glr::load_params(model_path);
  }
  ensure_parent(out_path);
  Manifest manifest("eval", rc);

  const std::vector<double> ps =
      rc.p_sweep.empty() ? std::vector<double>{rc.interruption_prob} : rc.p_sweep;
  const std::vector<int> planes = rc.plane_sweep.empty()
                                      ? std::vector<int>{rc.constellation.num_planes}
                                      : rc.plane_sweep;
  std::ofstream csv(out_path);
  csv << glr::kMetricsCsvHeader << '\n';
  for (int np : planes) {
    for (double p : ps) {
      const auto m = glr::run_experiment(rc.experiment(p, np), params ? &*params : nullptr);
      glr::write_metrics_csv_rows(csv, m);
      for (const auto& a : m.algorithms) {
        std::cout << glr::to_string(a.algorithm) << " nodes=" << m.nodes << " p=" << p
                  << " drop_rate=" << a.drop_rate << " median_packet_s=" << a.median_packet_s
                  << '\n';
      }
    }
  }
  csv.close();
  if (!csv) throw std::runtime_error("cannot write " + out_path);
  if (params) manifest.artifact("model", model_path);
  manifest.artifact("metrics", out_path);
  manifest.write(manifest_for(common, out_path));
  return 0;
}

int cmd_gradcheck(std::uint64_t seed, int samples, int max_nodes, double tolerance, bool perturb) {
  glr::GradientTamper tamper;
  if (perturb) {
    tamper = [](glr::ModelParameters& g) { g.dense_w1(0, 0) += 1e-2; };
  }
  const auto report = glr::gradient_check(seed, samples, max_nodes, 1e-5, 1e-3, tamper);
  std::cout << "tensor,max_relative_error\n" << std::setprecision(3) << std::scientific;
  for (const auto& [name, err] : report.max_relative_error) {
    std::cout << name << ',' << err << '\n';
  }
  const bool ok = report.passed(tolerance);
  std::cout << (ok ? "PASS" : "FAIL") << " worst=" << report.worst << " tolerance=" << tolerance
            << " samples=" << report.samples << '\n';
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GNN-based LEO satellite routing toolkit"};
  app.set_version_flag("--version", GLR_VERSION);
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", common.config_path, "key = value config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", common.sets, "override a config key (key=value), repeatable");
    sub->add_option("--seed", common.seed, "master seed");
    sub->add_option("--jobs", common.jobs, "worker thread cap");
    sub->add_option("--manifest", common.manifest_path, "run manifest path");
  };
  auto add_constellation_flags = [](CLI::App* sub, Overrides& ov) {
    ov.add(sub, "--planes", "num_planes", "orbital planes");
    ov.add(sub, "--sats-per-plane", "sats_per_plane", "satellites per plane");
    ov.add(sub, "--isl-policy", "isl_policy", "grid-capped or range-graph");
    ov.add(sub, "--snapshots", "snapshot_count", "number of snapshots");
    ov.add(sub, "--snapshot-interval", "snapshot_interval_s", "snapshot cadence in seconds");
  };

  Overrides ov_const, ov_data, ov_train, ov_eval;
  std::string const_out = "snapshots";
  auto* c_const = app.add_subcommand("constellation", "write snapshot JSON per cadence step");
  add_common(c_const);
  add_constellation_flags(c_const, ov_const);
  c_const->add_option("-o,--out", const_out, "output directory");

  std::string data_out = "dataset.bin";
  auto* c_data = app.add_subcommand("dataset", "build the labelled training dataset");
  add_common(c_data);
  add_constellation_flags(c_data, ov_data);
  ov_data.add(c_data, "--destinations", "destinations_per_snapshot", "destinations per snapshot");
  c_data->add_option("-o,--out", data_out, "dataset file");

  std::string train_dataset, train_out = "model.bin", train_csv;
  auto* c_train = app.add_subcommand("train", "train the model on a dataset");
  add_common(c_train);
  c_train->add_option("-d,--dataset", train_dataset, "dataset file")->required();
  c_train->add_option("-o,--out", train_out, "parameter file");
  c_train->add_option("--epoch-csv", train_csv, "per-epoch loss CSV (default <out>.epochs.csv)");
  ov_train.add(c_train, "--lr", "learning_rate", "learning rate");
  ov_train.add(c_train, "--beta", "beta", "L2 weight-decay coefficient");
  ov_train.add(c_train, "--epochs", "epochs", "maximum epochs");
  ov_train.add(c_train, "--batch", "batch", "samples per optimizer step");
  ov_train.add(c_train, "--patience", "patience", "early-stopping patience");
  ov_train.add(c_train, "--hidden", "hidden", "hidden width");
  ov_train.add(c_train, "--optimizer", "optimizer", "adam or sgd");

  std::string eval_model, eval_out = "metrics.csv";
  auto* c_eval = app.add_subcommand("eval", "route packets and write metrics CSV");
  add_common(c_eval);
  add_constellation_flags(c_eval, ov_eval);
  c_eval->add_option("-m,--model", eval_model, "parameter file (required for GLR)");
  c_eval->add_option("-o,--out", eval_out, "metrics CSV");
  ov_eval.add(c_eval, "--packets", "packets", "packets per experiment");
  ov_eval.add(c_eval, "--p", "interruption_prob", "link interruption probability");
  ov_eval.add(c_eval, "--p-sweep", "p_sweep", "comma-separated probabilities");
  ov_eval.add(c_eval, "--plane-sweep", "plane_sweep", "comma-separated plane counts");
  ov_eval.add(c_eval, "--algorithms", "algorithms", "comma-separated subset of GLR,TBR,TSR,CGR");
  ov_eval.add(c_eval, "--eval-snapshots", "eval_snapshot_count", "evaluation snapshots");
  ov_eval.add(c_eval, "--eval-start", "eval_snapshot_start_s", "first evaluation time (s)");

  std::uint64_t gc_seed = 0;
  int gc_samples = 10, gc_nodes = 10;
  double gc_tol = 1e-4;
  bool gc_perturb = false;
  auto* c_grad = app.add_subcommand("gradcheck", "finite-difference check of the backward pass");
  c_grad->add_option("--seed", gc_seed, "seed");
  c_grad->add_option("--samples", gc_samples, "random graphs")->check(CLI::PositiveNumber);
  c_grad->add_option("--max-nodes", gc_nodes, "largest graph")->check(CLI::Range(2, 1000));
  c_grad->add_option("--tolerance", gc_tol, "relative error bound");
  c_grad->add_flag("--perturb", gc_perturb, "corrupt one gradient entry (checker self-test)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_const) return cmd_constellation(common, ov_const, const_out);
    if (*c_data) return cmd_dataset(common, ov_data, data_out);
    if (*c_train) return cmd_train(common, ov_train, train_dataset, train_out, train_csv);
    if (*c_eval) return cmd_eval(common, ov_eval, eval_model, eval_out);
    if (*c_grad) return cmd_gradcheck(gc_seed, gc_samples, gc_nodes, gc_tol, gc_perturb);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
