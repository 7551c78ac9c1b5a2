// End-to-end experiment pipeline shared by the command-line tool and the
// acceptance suite: dataset synthesis, featurization with a train/test
// split, adversarial training, and evaluation artifacts.
//
// Reproducibility: every stage derives its randomness from the one config
// seed via sub_seed(seed, index). Trace i uses index i; the model
// initializer and the training loop use two reserved indices far above any
// plausible trace count.
//
// Split policy: only controlled-motion profiles train. Per (motion,
// environment, placement) cell, the first round(train_fraction * n) traces
// go to training; everything else, plus every uncontrolled-motion trace, is
// test data. Splitting whole traces (not profiles) keeps segments of one
// recording on one side of the split.
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "banauth/channel.hpp"
#include "banauth/eval.hpp"
#include "banauth/io.hpp"
#include "banauth/model.hpp"
#include "banauth/profile.hpp"
#include "banauth/rng.hpp"
#include "banauth/train.hpp"
#include "json.hpp"

namespace banauth {

// Defaults give 2 * (5*5*16 + 5*20) = 1000 traces.
struct DatasetShape {
  int traces_per_cell = 16;      // per controlled (motion, environment) cell,
                                 // mirrored off-body
  int uncontrolled_per_env = 20; // free-motion traces per environment, both
                                 // placements, test only
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  double fs = 500.0;
  double trace_s = 60.0;
  double segment_s = 5.0;
  DatasetShape shape;
  double train_fraction = 2.0 / 3.0;
  int channels = 128;
  int head_hidden = 64;
  TrainConfig train;  // trainer seed is derived from `seed`, see run_train
  std::string out_dir = "out";
};

inline constexpr std::uint64_t kModelSeedIndex = 1u << 20;
inline constexpr std::uint64_t kTrainSeedIndex = (1u << 20) + 1;

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["fs"] = c.fs;
  j["trace_s"] = c.trace_s;
  j["segment_s"] = c.segment_s;
  j["shape"] = {{"traces_per_cell", c.shape.traces_per_cell},
                {"uncontrolled_per_env", c.shape.uncontrolled_per_env}};
  j["train_fraction"] = c.train_fraction;
  j["channels"] = c.channels;
  j["head_hidden"] = c.head_hidden;
  j["train"] = {{"alpha", c.train.alpha},
                {"beta", c.train.beta},
                {"lr_pred", c.train.lr_pred},
                {"lr_disc", c.train.lr_disc},
                {"lr_clas", c.train.lr_clas},
                {"lr_extractor", c.train.lr_extractor},
                {"batch", c.train.batch},
                {"outer_iters", c.train.outer_iters},
                {"inner_iters", c.train.inner_iters}};
  j["out_dir"] = c.out_dir;
  return j;
}

// Unknown keys are ignored; missing keys keep their defaults. The seed is
// the one mandatory field.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (!j.contains("seed"))
    throw std::invalid_argument("config: seed is required");
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("fs")) c.fs = j.at("fs").get<double>();
  if (j.contains("trace_s")) c.trace_s = j.at("trace_s").get<double>();
  if (j.contains("segment_s")) c.segment_s = j.at("segment_s").get<double>();
  if (j.contains("shape")) {
    const auto& s = j.at("shape");
    if (s.contains("traces_per_cell"))
      c.shape.traces_per_cell = s.at("traces_per_cell").get<int>();
    if (s.contains("uncontrolled_per_env"))
      c.shape.uncontrolled_per_env = s.at("uncontrolled_per_env").get<int>();
  }
  if (j.contains("train_fraction"))
    c.train_fraction = j.at("train_fraction").get<double>();
  if (j.contains("channels")) c.channels = j.at("channels").get<int>();
  if (j.contains("head_hidden")) c.head_hidden = j.at("head_hidden").get<int>();
  if (j.contains("train")) {
    const auto& t = j.at("train");
    if (t.contains("alpha")) c.train.alpha = t.at("alpha").get<double>();
    if (t.contains("beta")) c.train.beta = t.at("beta").get<double>();
    if (t.contains("lr_pred")) c.train.lr_pred = t.at("lr_pred").get<double>();
    if (t.contains("lr_disc")) c.train.lr_disc = t.at("lr_disc").get<double>();
    if (t.contains("lr_clas")) c.train.lr_clas = t.at("lr_clas").get<double>();
    if (t.contains("lr_extractor"))
      c.train.lr_extractor = t.at("lr_extractor").get<double>();
    if (t.contains("batch")) c.train.batch = t.at("batch").get<int>();
    if (t.contains("outer_iters"))
      c.train.outer_iters = t.at("outer_iters").get<int>();
    if (t.contains("inner_iters"))
      c.train.inner_iters = t.at("inner_iters").get<int>();
  }
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  return config_from_json(detail::load_json(path));
}

// --- simulate ---

struct SimulateResult {
  std::vector<ManifestEntry> entries;
  // count per (y, z, v) for reporting
  std::map<std::tuple<int, int, int>, int> cell_counts;
};

inline SimulateResult run_simulate(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(cfg.out_dir) / "traces");

  DatasetSpec spec;
  spec.traces_per_cell = cfg.shape.traces_per_cell;
  spec.uncontrolled_per_env = cfg.shape.uncontrolled_per_env;
  spec.duration_s = cfg.trace_s;
  spec.sample_rate_hz = cfg.fs;
  const auto traces = gen_dataset(spec, cfg.seed);

  SimulateResult res;
  char name[64];
  for (std::size_t idx = 0; idx < traces.size(); ++idx) {
    const RssTrace& tr = traces[idx];
    std::snprintf(name, sizeof name, "traces/trace_%05llu.csv",
                  static_cast<unsigned long long>(idx));
    write_trace((fs::path(cfg.out_dir) / name).string(), tr);
    ManifestEntry e;
    e.file = name;
    e.y = static_cast<int>(tr.y);
    e.z = static_cast<int>(tr.z);
    e.v = static_cast<int>(tr.v);
    e.seed = tr.seed;
    res.entries.push_back(e);
    ++res.cell_counts[{e.y, e.z, e.v}];
  }
  write_manifest((fs::path(cfg.out_dir) / "manifest.json").string(),
                 res.entries);
  return res;
}

// --- featurize ---

struct FeaturizeResult {
  std::size_t train_profiles = 0;
  std::size_t test_profiles = 0;
};

inline FeaturizeResult run_featurize(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const auto entries =
      read_manifest((fs::path(cfg.out_dir) / "manifest.json").string());
  if (entries.empty()) throw std::runtime_error("featurize: empty manifest");

  // per-cell running index decides train membership; uncontrolled-motion
  // traces never train
  std::map<std::tuple<int, int, int>, int> cell_total;
  for (const auto& e : entries) ++cell_total[{e.y, e.z, e.v}];
  std::map<std::tuple<int, int, int>, int> cell_seen;

  std::vector<PropagationProfile> train, test;
  for (const auto& e : entries) {
    const RssTrace tr =
        read_trace((fs::path(cfg.out_dir) / e.file).string());
    const auto ps = profiles_from_trace(tr, cfg.segment_s);
    const std::tuple<int, int, int> cell{e.y, e.z, e.v};
    const int pos = cell_seen[cell]++;
    const bool uncontrolled =
        e.z == static_cast<int>(MotionClass::uncontrolled);
    const int n_train = static_cast<int>(
        std::lround(cfg.train_fraction * cell_total[cell]));
    const bool to_train = !uncontrolled && pos < n_train;
    auto& sink = to_train ? train : test;
    for (const auto& p : ps) sink.push_back(p);
  }
  if (train.empty()) throw std::runtime_error("featurize: empty training split");
  if (test.empty()) throw std::runtime_error("featurize: empty test split");

  const Normalizer norm = Normalizer::fit(train);
  write_profiles_jsonl((fs::path(cfg.out_dir) / "profiles_train.jsonl").string(),
                       train);
  write_profiles_jsonl((fs::path(cfg.out_dir) / "profiles_test.jsonl").string(),
                       test);
  write_normalizer((fs::path(cfg.out_dir) / "normalizer.json").string(), norm);
  return {train.size(), test.size()};
}

// --- train ---

inline TrainSet load_train_set(const std::string& profiles_path,
                               const Normalizer& norm) {
  TrainSet data;
  for (const auto& p : read_profiles_jsonl(profiles_path)) {
    data.x.push_back(norm.apply(p.features));
    data.y.push_back(static_cast<int>(p.y));
    data.z.push_back(static_cast<int>(p.z));
    data.v.push_back(static_cast<int>(p.v));
  }
  return data;
}

struct TrainResult {
  TrainHistory history;
  std::size_t samples = 0;
};

// `baseline` zeroes both adversary weights; data, seeds, and every other
// knob stay identical so runs are directly comparable.
inline TrainResult run_train(const ExperimentConfig& cfg, bool baseline = false) {
  namespace fs = std::filesystem;
  const Normalizer norm =
      read_normalizer((fs::path(cfg.out_dir) / "normalizer.json").string());
  const TrainSet data = load_train_set(
      (fs::path(cfg.out_dir) / "profiles_train.jsonl").string(), norm);

  Rng model_rng(sub_seed(cfg.seed, kModelSeedIndex));
  ConvModel model = make_profile_model(model_rng, cfg.channels, cfg.head_hidden,
                                       kNumControlledMotions, kNumEnvironments);
  TrainConfig tc = cfg.train;
  tc.seed = sub_seed(cfg.seed, kTrainSeedIndex);
  if (baseline) tc.alpha = tc.beta = 0.0;

  TrainResult res;
  res.history = train(model, data, tc);
  res.samples = data.size();
  write_checkpoint((fs::path(cfg.out_dir) / "checkpoint.json").string(), model);
  write_history((fs::path(cfg.out_dir) / "history.json").string(), res.history);
  return res;
}

// --- evaluate ---

struct EvaluateResult {
  Metrics metrics;
  double auroc = 0.0;
  std::vector<PredictionRecord> records;
};

inline std::vector<PredictionRecord> score_profiles(
    const ConvModel& model, const Normalizer& norm,
    const std::vector<PropagationProfile>& profiles) {
  std::vector<PredictionRecord> records;
  records.reserve(profiles.size());
  for (const auto& p : profiles) {
    PredictionRecord r;
    r.score_on = model.score_on(norm.apply(p.features));
    r.true_y = static_cast<int>(p.y);
    r.z = static_cast<int>(p.z);
    r.v = static_cast<int>(p.v);
    records.push_back(r);
  }
  return records;
}

inline EvaluateResult run_evaluate(const ExperimentConfig& cfg) {
  namespace fs = std::filesystem;
  const ConvModel model =
      read_checkpoint((fs::path(cfg.out_dir) / "checkpoint.json").string());
  const Normalizer norm =
      read_normalizer((fs::path(cfg.out_dir) / "normalizer.json").string());
  const auto profiles = read_profiles_jsonl(
      (fs::path(cfg.out_dir) / "profiles_test.jsonl").string());
  if (profiles.empty()) throw std::runtime_error("evaluate: no test profiles");

  EvaluateResult res;
  res.records = score_profiles(model, norm, profiles);
  res.metrics = metrics(res.records);
  const auto curve = roc(res.records);
  res.auroc = auroc(curve);

  nlohmann::json report = metrics_to_json(res.metrics);
  report["auroc"] = res.auroc;
  detail::save_json((fs::path(cfg.out_dir) / "metrics.json").string(), report);
  {
    auto os = detail::open_out((fs::path(cfg.out_dir) / "roc.csv").string());
    write_roc_csv(os, curve);
  }
  {
    auto os = detail::open_out((fs::path(cfg.out_dir) / "roc.svg").string());
    write_roc_svg(os, curve, "held-out test profiles");
  }
  const auto history_path = (fs::path(cfg.out_dir) / "history.json").string();
  if (fs::exists(history_path)) {
    const TrainHistory h = read_history(history_path);
    std::vector<double> lp, ld, lc;
    for (const auto& s : h) {
      lp.push_back(s.l_pred);
      ld.push_back(s.l_disc);
      lc.push_back(s.l_clas);
    }
    auto os = detail::open_out((fs::path(cfg.out_dir) / "losses.svg").string());
    write_series_svg(os,
                     {{"predictor", lp}, {"discriminator", ld}, {"classifier", lc}},
                     "training losses");
  }
  return res;
}

}  // namespace banauth
