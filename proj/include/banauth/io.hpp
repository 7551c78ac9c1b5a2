// File formats: trace CSV with JSON sidecar, dataset manifest, profile
// JSON-lines, normalizer, training history, and model checkpoints.
//
// Determinism contract: every writer formats numbers identically on every
// run (fixed-precision CSV, shortest-round-trip JSON doubles), so a repeated
// pipeline run produces byte-identical files. Checkpoints round-trip weights
// exactly.
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "banauth/channel.hpp"
#include "banauth/model.hpp"
#include "banauth/profile.hpp"
#include "banauth/train.hpp"
#include "json.hpp"

namespace banauth {

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  return is;
}

inline nlohmann::json load_json(const std::string& path) {
  auto is = open_in(path);
  nlohmann::json j;
  is >> j;
  return j;
}

inline void save_json(const std::string& path, const nlohmann::json& j) {
  auto os = open_out(path);
  os << j.dump(2) << "\n";
}

}  // namespace detail

// --- traces ---

// Rows are "t_s,rss_dbm" at fixed precision; microsecond-scale time and
// micro-dBm resolution are far below the simulator's noise floor.
inline void write_trace_csv(const std::string& csv_path, const RssTrace& tr) {
  auto os = detail::open_out(csv_path);
  os << "t_s,rss_dbm\n";
  char buf[64];
  for (std::size_t i = 0; i < tr.signal.samples.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n",
                  static_cast<double>(i) / tr.signal.sample_rate_hz,
                  tr.signal.samples[i]);
    os << buf;
  }
}

inline std::string sidecar_path(const std::string& csv_path) {
  return std::filesystem::path(csv_path).replace_extension(".json").string();
}

inline void write_trace_sidecar(const std::string& path, const RssTrace& tr) {
  nlohmann::json j;
  j["y"] = static_cast<int>(tr.y);
  j["z"] = static_cast<int>(tr.z);
  j["v"] = static_cast<int>(tr.v);
  j["seed"] = tr.seed;
  j["fs"] = tr.signal.sample_rate_hz;
  detail::save_json(path, j);
}

inline void write_trace(const std::string& csv_path, const RssTrace& tr) {
  write_trace_csv(csv_path, tr);
  write_trace_sidecar(sidecar_path(csv_path), tr);
}

inline RssTrace read_trace(const std::string& csv_path) {
  const nlohmann::json meta = detail::load_json(sidecar_path(csv_path));
  RssTrace tr;
  tr.y = static_cast<OnOff>(meta.at("y").get<int>());
  tr.z = static_cast<MotionClass>(meta.at("z").get<int>());
  tr.v = static_cast<Environment>(meta.at("v").get<int>());
  tr.seed = meta.at("seed").get<std::uint64_t>();
  tr.signal.sample_rate_hz = meta.at("fs").get<double>();

  auto is = detail::open_in(csv_path);
  std::string line;
  if (!std::getline(is, line) || line != "t_s,rss_dbm")
    throw std::runtime_error("bad trace header in " + csv_path);
  while (std::getline(is, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("bad trace row in " + csv_path);
    tr.signal.samples.push_back(std::stod(line.substr(comma + 1)));
  }
  return tr;
}

// --- manifest ---

struct ManifestEntry {
  std::string file;  // csv path relative to the manifest's directory
  int y = 0;
  int z = 0;
  int v = 0;
  std::uint64_t seed = 0;
};

inline void write_manifest(const std::string& path,
                           const std::vector<ManifestEntry>& entries) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : entries) {
    arr.push_back({{"file", e.file},
                   {"y", e.y},
                   {"z", e.z},
                   {"v", e.v},
                   {"seed", e.seed}});
  }
  detail::save_json(path, arr);
}

inline std::vector<ManifestEntry> read_manifest(const std::string& path) {
  const nlohmann::json arr = detail::load_json(path);
  if (!arr.is_array()) throw std::runtime_error("manifest must be an array");
  std::vector<ManifestEntry> out;
  for (const auto& j : arr) {
    ManifestEntry e;
    e.file = j.at("file").get<std::string>();
    e.y = j.at("y").get<int>();
    e.z = j.at("z").get<int>();
    e.v = j.at("v").get<int>();
    e.seed = j.at("seed").get<std::uint64_t>();
    out.push_back(std::move(e));
  }
  return out;
}

// --- profiles ---

inline void write_profiles_jsonl(const std::string& path,
                                 const std::vector<PropagationProfile>& ps) {
  auto os = detail::open_out(path);
  for (const auto& p : ps) {
    nlohmann::json j;
    j["features"] = p.features;
    j["y"] = static_cast<int>(p.y);
    j["z"] = static_cast<int>(p.z);
    j["v"] = static_cast<int>(p.v);
    os << j.dump() << "\n";
  }
}

inline std::vector<PropagationProfile> read_profiles_jsonl(
    const std::string& path) {
  auto is = detail::open_in(path);
  std::vector<PropagationProfile> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    PropagationProfile p;
    p.features = j.at("features").get<std::vector<double>>();
    p.y = static_cast<OnOff>(j.at("y").get<int>());
    p.z = static_cast<MotionClass>(j.at("z").get<int>());
    p.v = static_cast<Environment>(j.at("v").get<int>());
    out.push_back(std::move(p));
  }
  return out;
}

// --- normalizer ---

inline void write_normalizer(const std::string& path, const Normalizer& n) {
  nlohmann::json j;
  j["mean"] = n.mean;
  j["stddev"] = n.stddev;
  detail::save_json(path, j);
}

inline Normalizer read_normalizer(const std::string& path) {
  const nlohmann::json j = detail::load_json(path);
  Normalizer n;
  n.mean = j.at("mean").get<std::vector<double>>();
  n.stddev = j.at("stddev").get<std::vector<double>>();
  if (n.mean.size() != n.stddev.size())
    throw std::runtime_error("normalizer arrays disagree in " + path);
  return n;
}

// --- training history ---

inline void write_history(const std::string& path, const TrainHistory& h) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < h.size(); ++i) {
    arr.push_back({{"iter", i},
                   {"l_pred", h[i].l_pred},
                   {"l_disc", h[i].l_disc},
                   {"l_clas", h[i].l_clas},
                   {"value", h[i].value}});
  }
  detail::save_json(path, arr);
}

inline TrainHistory read_history(const std::string& path) {
  const nlohmann::json arr = detail::load_json(path);
  TrainHistory h;
  for (const auto& j : arr) {
    TrainStats s;
    s.l_pred = j.at("l_pred").get<double>();
    s.l_disc = j.at("l_disc").get<double>();
    s.l_clas = j.at("l_clas").get<double>();
    s.value = j.at("value").get<double>();
    h.push_back(s);
  }
  return h;
}

// --- checkpoints ---

namespace detail {

inline nlohmann::json dense_to_json(const Dense& d) {
  return {{"in", d.in_dim}, {"out", d.out_dim}, {"w", d.w}, {"b", d.b}};
}

inline void dense_from_json(const nlohmann::json& j, Dense& d) {
  if (j.at("in").get<int>() != d.in_dim || j.at("out").get<int>() != d.out_dim)
    throw std::runtime_error("checkpoint dense shape mismatch");
  d.w = j.at("w").get<std::vector<double>>();
  d.b = j.at("b").get<std::vector<double>>();
  if (d.w.size() != static_cast<std::size_t>(d.in_dim) * d.out_dim ||
      d.b.size() != static_cast<std::size_t>(d.out_dim))
    throw std::runtime_error("checkpoint dense payload mismatch");
}

inline nlohmann::json head_to_json(const Head& h) {
  nlohmann::json j;
  j["d1"] = dense_to_json(h.d1);
  if (h.has_hidden()) j["d2"] = dense_to_json(h.d2);
  return j;
}

inline void head_from_json(const nlohmann::json& j, Head& h) {
  dense_from_json(j.at("d1"), h.d1);
  if (h.has_hidden()) dense_from_json(j.at("d2"), h.d2);
}

}  // namespace detail

inline nlohmann::json model_to_json(const ConvModel& m) {
  nlohmann::json j;
  j["input_dim"] = m.extractor.input_dim();
  j["channels"] = m.extractor.channels();
  j["head_hidden"] = m.pred.has_hidden() ? m.pred.d1.out_dim : 0;
  j["n_z"] = m.n_z;
  j["n_v"] = m.n_v;
  auto& layers = j["extractor"] = nlohmann::json::array();
  for (const auto& c : m.extractor.layers())
    layers.push_back({{"in", c.in_ch},
                      {"out", c.out_ch},
                      {"k", c.ksize},
                      {"w", c.w},
                      {"b", c.b}});
  j["pred"] = detail::head_to_json(m.pred);
  j["disc"] = detail::head_to_json(m.disc);
  j["clas"] = detail::head_to_json(m.clas);
  return j;
}

inline ConvModel model_from_json(const nlohmann::json& j) {
  Rng scratch(1);  // weights are overwritten below
  ConvExtractor ext(j.at("input_dim").get<int>(), j.at("channels").get<int>(),
                    scratch);
  ConvModel m(std::move(ext), j.at("head_hidden").get<int>(),
              j.at("n_z").get<int>(), j.at("n_v").get<int>(), scratch);
  const auto& layers = j.at("extractor");
  if (layers.size() != m.extractor.layers().size())
    throw std::runtime_error("checkpoint layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Conv1d& c = m.extractor.layers()[l];
    const auto& jl = layers[l];
    if (jl.at("in").get<int>() != c.in_ch || jl.at("out").get<int>() != c.out_ch ||
        jl.at("k").get<int>() != c.ksize)
      throw std::runtime_error("checkpoint conv shape mismatch");
    c.w = jl.at("w").get<std::vector<double>>();
    c.b = jl.at("b").get<std::vector<double>>();
    if (c.w.size() != static_cast<std::size_t>(c.out_ch) * c.in_ch * c.ksize ||
        c.b.size() != static_cast<std::size_t>(c.out_ch))
      throw std::runtime_error("checkpoint conv payload mismatch");
  }
  detail::head_from_json(j.at("pred"), m.pred);
  detail::head_from_json(j.at("disc"), m.disc);
  detail::head_from_json(j.at("clas"), m.clas);
  return m;
}

inline void write_checkpoint(const std::string& path, const ConvModel& m) {
  detail::save_json(path, model_to_json(m));
}

inline ConvModel read_checkpoint(const std::string& path) {
  return model_from_json(detail::load_json(path));
}

}  // namespace banauth
