// Detection metrics over scored segments: accuracy / TP / FP at a threshold,
// grouped breakdowns by motion and environment label, threshold-sweep ROC,
// and trapezoid AUROC. Includes CSV / JSON / SVG emitters for reports.
//
// Acceptance rule everywhere: a segment is accepted as on-body iff
// score > threshold. An exact tie rejects, so all-0.5 scores at the default
// threshold accept nothing.
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace banauth {

struct PredictionRecord {
  double score_on = 0.0;  // probability of on-body, in [0, 1]
  int true_y = 0;         // 1 on-body, 0 off-body
  int z = 0;              // motion label
  int v = 0;              // environment label
};

struct GroupMetrics {
  std::size_t count = 0;
  double accuracy = 0.0;
  std::optional<double> tp_rate;  // absent when the group has no on-body rows
  std::optional<double> fp_rate;  // absent when the group has no off-body rows
};

struct Metrics {
  std::size_t count = 0;
  double accuracy = 0.0;
  std::optional<double> tp_rate;
  std::optional<double> fp_rate;
  std::map<int, GroupMetrics> by_motion;
  std::map<int, GroupMetrics> by_environment;
};

namespace detail {

inline void validate_records(const std::vector<PredictionRecord>& records) {
  if (records.empty()) throw std::invalid_argument("metrics: no records");
  for (const auto& r : records) {
    if (!(r.score_on >= 0.0 && r.score_on <= 1.0))
      throw std::invalid_argument("metrics: score outside [0, 1]");
    if (r.true_y != 0 && r.true_y != 1)
      throw std::invalid_argument("metrics: label must be 0 or 1");
  }
}

struct Tally {
  std::size_t n = 0, correct = 0, on = 0, on_hit = 0, off = 0, off_hit = 0;

  void add(int true_y, bool accepted) {
    ++n;
    if (true_y == 1) {
      ++on;
      if (accepted) {
        ++on_hit;
        ++correct;
      }
    } else {
      ++off;
      if (accepted)
        ++off_hit;
      else
        ++correct;
    }
  }

  GroupMetrics finish() const {
    GroupMetrics g;
    g.count = n;
    g.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    if (on > 0) g.tp_rate = static_cast<double>(on_hit) / static_cast<double>(on);
    if (off > 0)
      g.fp_rate = static_cast<double>(off_hit) / static_cast<double>(off);
    return g;
  }
};

}  // namespace detail

inline Metrics metrics(const std::vector<PredictionRecord>& records,
                       double threshold = 0.5) {
  detail::validate_records(records);
  detail::Tally total;
  std::map<int, detail::Tally> per_z, per_v;
  for (const auto& r : records) {
    const bool accepted = r.score_on > threshold;
    total.add(r.true_y, accepted);
    per_z[r.z].add(r.true_y, accepted);
    per_v[r.v].add(r.true_y, accepted);
  }
  Metrics m;
  const GroupMetrics g = total.finish();
  m.count = g.count;
  m.accuracy = g.accuracy;
  m.tp_rate = g.tp_rate;
  m.fp_rate = g.fp_rate;
  for (const auto& [key, tally] : per_z) m.by_motion[key] = tally.finish();
  for (const auto& [key, tally] : per_v) m.by_environment[key] = tally.finish();
  return m;
}

struct RocPoint {
  double threshold = 0.0;
  double fp_rate = 0.0;
  double tp_rate = 0.0;
};

// Threshold sweep over the distinct scores plus the two infinities. Equal
// scores collapse into one step, so the curve walks diagonally through ties.
inline std::vector<RocPoint> roc(const std::vector<PredictionRecord>& records) {
  detail::validate_records(records);
  std::size_t n_on = 0, n_off = 0;
  for (const auto& r : records) (r.true_y == 1 ? n_on : n_off)++;
  if (n_on == 0 || n_off == 0)
    throw std::invalid_argument("roc: need both classes");

  std::vector<double> cuts;
  cuts.reserve(records.size() + 2);
  cuts.push_back(std::numeric_limits<double>::infinity());
  for (const auto& r : records) cuts.push_back(r.score_on);
  cuts.push_back(-std::numeric_limits<double>::infinity());
  std::sort(cuts.begin(), cuts.end(), std::greater<double>());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<RocPoint> curve;
  curve.reserve(cuts.size());
  for (double t : cuts) {
    std::size_t tp = 0, fp = 0;
    for (const auto& r : records) {
      if (r.score_on > t) (r.true_y == 1 ? tp : fp)++;
    }
    RocPoint p;
    p.threshold = t;
    p.tp_rate = static_cast<double>(tp) / static_cast<double>(n_on);
    p.fp_rate = static_cast<double>(fp) / static_cast<double>(n_off);
    curve.push_back(p);
  }
  return curve;
}

inline double auroc(const std::vector<RocPoint>& curve) {
  if (curve.size() < 2) throw std::invalid_argument("auroc: degenerate curve");
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const double dx = curve[i].fp_rate - curve[i - 1].fp_rate;
    area += dx * 0.5 * (curve[i].tp_rate + curve[i - 1].tp_rate);
  }
  return area;
}

inline double auroc(const std::vector<PredictionRecord>& records) {
  return auroc(roc(records));
}

// --- report emission ---

namespace detail {

inline nlohmann::json group_to_json(const GroupMetrics& g) {
  nlohmann::json j;
  j["count"] = g.count;
  j["accuracy"] = g.accuracy;
  if (g.tp_rate) j["tp_rate"] = *g.tp_rate;
  if (g.fp_rate) j["fp_rate"] = *g.fp_rate;
  return j;
}

}  // namespace detail

inline nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json j;
  j["count"] = m.count;
  j["accuracy"] = m.accuracy;
  if (m.tp_rate) j["tp_rate"] = *m.tp_rate;
  if (m.fp_rate) j["fp_rate"] = *m.fp_rate;
  for (const auto& [key, g] : m.by_motion)
    j["by_motion"][std::to_string(key)] = detail::group_to_json(g);
  for (const auto& [key, g] : m.by_environment)
    j["by_environment"][std::to_string(key)] = detail::group_to_json(g);
  return j;
}

inline void write_roc_csv(std::ostream& os, const std::vector<RocPoint>& curve) {
  os << "threshold,fp_rate,tp_rate\n";
  char buf[128];
  for (const auto& p : curve) {
    if (std::isinf(p.threshold)) {
      std::snprintf(buf, sizeof buf, "%s,%.9f,%.9f\n",
                    p.threshold > 0 ? "inf" : "-inf", p.fp_rate, p.tp_rate);
    } else {
      std::snprintf(buf, sizeof buf, "%.9f,%.9f,%.9f\n", p.threshold, p.fp_rate,
                    p.tp_rate);
    }
    os << buf;
  }
}

// Static SVG: unit-square ROC with a chance diagonal. No scripts, no
// external references, so the file is safe to embed anywhere.
inline void write_roc_svg(std::ostream& os, const std::vector<RocPoint>& curve,
                          const std::string& title = "ROC") {
  const double w = 440.0, h = 440.0, pad = 40.0;
  const double span = w - 2 * pad;
  auto px = [&](double fp) { return pad + fp * span; };
  auto py = [&](double tp) { return h - pad - tp * span; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"14\">"
     << title << "</text>\n";
  os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << span
     << "\" height=\"" << span << "\" fill=\"none\" stroke=\"#888\"/>\n";
  os << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1)
     << "\" y2=\"" << py(1) << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\" "
        "points=\"";
  char buf[64];
  for (const auto& p : curve) {
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(p.fp_rate), py(p.tp_rate));
    os << buf;
  }
  os << "\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"" << h - 8
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"12\">false positive rate</text>\n";
  os << "<text x=\"14\" y=\"" << h / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        "transform=\"rotate(-90 14 "
     << h / 2 << ")\">true positive rate</text>\n";
  os << "</svg>\n";
}

// Per-iteration training losses as a static SVG line chart, one polyline per
// series. `series` pairs a label with equally-spaced samples.
inline void write_series_svg(
    std::ostream& os,
    const std::vector<std::pair<std::string, std::vector<double>>>& series,
    const std::string& title = "training curves") {
  const double w = 640.0, h = 400.0, pad = 46.0;
  double lo = 0.0, hi = 1.0;
  bool first = true;
  std::size_t max_len = 0;
  for (const auto& [name, ys] : series) {
    max_len = std::max(max_len, ys.size());
    for (double y : ys) {
      if (!std::isfinite(y)) continue;
      if (first) {
        lo = hi = y;
        first = false;
      } else {
        lo = std::min(lo, y);
        hi = std::max(hi, y);
      }
    }
  }
  if (hi - lo < 1e-12) hi = lo + 1.0;
  const char* palette[] = {"#1f6fb2", "#c2403a", "#3a9a4e", "#8a5fb8",
                           "#b08a2e", "#3aa0a8"};

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << w / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"14\">"
     << title << "</text>\n";
  os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << w - 2 * pad
     << "\" height=\"" << h - 2 * pad << "\" fill=\"none\" stroke=\"#888\"/>\n";
  char buf[64];
  std::size_t si = 0;
  for (const auto& [name, ys] : series) {
    const char* color = palette[si % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const double fx =
          max_len > 1 ? static_cast<double>(i) / (max_len - 1) : 0.0;
      const double fy = (ys[i] - lo) / (hi - lo);
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", pad + fx * (w - 2 * pad),
                    h - pad - fy * (h - 2 * pad));
      os << buf;
    }
    os << "\"/>\n";
    os << "<text x=\"" << w - pad + 4 << "\" y=\"" << pad + 16 * (si + 1)
       << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
       << "\">" << name << "</text>\n";
    ++si;
  }
  os << "</svg>\n";
}

}  // namespace banauth
