// Tests for detection metrics and ROC/AUROC, cross-checked against the
// brute-force pair-count statistic in oracles.hpp.
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "banauth/eval.hpp"
#include "banauth/rng.hpp"
#include "oracles.hpp"

using namespace banauth;

namespace {

PredictionRecord rec(double score, int y, int z = 0, int v = 0) {
  PredictionRecord r;
  r.score_on = score;
  r.true_y = y;
  r.z = z;
  r.v = v;
  return r;
}

}  // namespace

TEST_CASE("all-correct predictions score perfectly") {
  std::vector<PredictionRecord> rs;
  for (int i = 0; i < 5; ++i) rs.push_back(rec(0.9, 1));
  for (int i = 0; i < 5; ++i) rs.push_back(rec(0.1, 0));
  const Metrics m = metrics(rs);
  CHECK(m.accuracy == 1.0);
  REQUIRE(m.tp_rate);
  REQUIRE(m.fp_rate);
  CHECK(*m.tp_rate == 1.0);
  CHECK(*m.fp_rate == 0.0);
  CHECK(m.count == 10);
}

TEST_CASE("a tied score rejects, so all-0.5 scores accept nothing") {
  std::vector<PredictionRecord> rs;
  for (int i = 0; i < 4; ++i) rs.push_back(rec(0.5, 1));
  for (int i = 0; i < 4; ++i) rs.push_back(rec(0.5, 0));
  const Metrics m = metrics(rs);
  CHECK(*m.tp_rate == 0.0);
  CHECK(*m.fp_rate == 0.0);
  CHECK(m.accuracy == 0.5);  // every off-body row is correct by rejection
}

TEST_CASE("hand-counted mixed batch") {
  std::vector<PredictionRecord> rs;
  for (int i = 0; i < 9; ++i) rs.push_back(rec(0.8, 1));
  rs.push_back(rec(0.2, 1));  // missed on-body
  for (int i = 0; i < 9; ++i) rs.push_back(rec(0.3, 0));
  rs.push_back(rec(0.7, 0));  // accepted off-body
  const Metrics m = metrics(rs);
  CHECK(m.accuracy == Catch::Approx(0.9));
  CHECK(*m.tp_rate == Catch::Approx(0.9));
  CHECK(*m.fp_rate == Catch::Approx(0.1));
}

TEST_CASE("single-class input leaves the missing rate absent") {
  std::vector<PredictionRecord> on_only{rec(0.9, 1), rec(0.4, 1)};
  const Metrics m = metrics(on_only);
  CHECK(m.tp_rate.has_value());
  CHECK_FALSE(m.fp_rate.has_value());
  CHECK(m.accuracy == 0.5);

  std::vector<PredictionRecord> off_only{rec(0.2, 0)};
  const Metrics m2 = metrics(off_only);
  CHECK_FALSE(m2.tp_rate.has_value());
  CHECK(m2.fp_rate.has_value());

  CHECK_THROWS_AS(roc(on_only), std::invalid_argument);
}

TEST_CASE("malformed inputs are rejected") {
  CHECK_THROWS_AS(metrics({}), std::invalid_argument);
  CHECK_THROWS_AS(metrics({rec(1.2, 1)}), std::invalid_argument);
  CHECK_THROWS_AS(metrics({rec(-0.1, 0)}), std::invalid_argument);
  CHECK_THROWS_AS(metrics({rec(0.5, 2)}), std::invalid_argument);
}

TEST_CASE("breakdowns group by motion and environment label") {
  std::vector<PredictionRecord> rs;
  // motion 0: two on-body hits; motion 1: one on-body miss, one off reject
  rs.push_back(rec(0.9, 1, 0, 0));
  rs.push_back(rec(0.8, 1, 0, 1));
  rs.push_back(rec(0.2, 1, 1, 0));
  rs.push_back(rec(0.1, 0, 1, 1));
  // uncontrolled bucket keeps its own key
  rs.push_back(rec(0.6, 0, 5, 2));
  const Metrics m = metrics(rs);

  REQUIRE(m.by_motion.count(0) == 1);
  REQUIRE(m.by_motion.count(1) == 1);
  REQUIRE(m.by_motion.count(5) == 1);
  CHECK(*m.by_motion.at(0).tp_rate == 1.0);
  CHECK_FALSE(m.by_motion.at(0).fp_rate.has_value());
  CHECK(*m.by_motion.at(1).tp_rate == 0.0);
  CHECK(*m.by_motion.at(1).fp_rate == 0.0);
  CHECK(*m.by_motion.at(5).fp_rate == 1.0);
  CHECK(m.by_motion.at(5).count == 1);

  REQUIRE(m.by_environment.count(2) == 1);
  CHECK(m.by_environment.at(2).count == 1);
  CHECK(m.by_environment.at(0).count == 2);

  // group tallies cover every record exactly once
  std::size_t total = 0;
  for (const auto& [k, g] : m.by_motion) total += g.count;
  CHECK(total == rs.size());
}

TEST_CASE("threshold metrics agree with explicit accept labels") {
  Rng rng(41);
  std::vector<PredictionRecord> rs;
  for (int i = 0; i < 300; ++i)
    rs.push_back(rec(rng.uniform(0.0, 1.0), rng.uniform_int(2), rng.uniform_int(5),
                     rng.uniform_int(5)));
  const Metrics m = metrics(rs, 0.5);

  std::size_t correct = 0, on = 0, on_hit = 0, off = 0, off_hit = 0;
  for (const auto& r : rs) {
    const int pred = r.score_on > 0.5 ? 1 : 0;
    if (pred == r.true_y) ++correct;
    if (r.true_y == 1) {
      ++on;
      on_hit += pred;
    } else {
      ++off;
      off_hit += pred;
    }
  }
  CHECK(m.accuracy == Catch::Approx(double(correct) / rs.size()));
  CHECK(*m.tp_rate == Catch::Approx(double(on_hit) / on));
  CHECK(*m.fp_rate == Catch::Approx(double(off_hit) / off));
}

TEST_CASE("perfect separation gives unit area") {
  std::vector<PredictionRecord> rs;
  for (int i = 0; i < 6; ++i) rs.push_back(rec(0.8 + 0.02 * i, 1));
  for (int i = 0; i < 6; ++i) rs.push_back(rec(0.1 + 0.02 * i, 0));
  CHECK(auroc(rs) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("independent scores sit on the chance line") {
  Rng rng(99);
  std::vector<PredictionRecord> rs;
  for (int i = 0; i < 4000; ++i)
    rs.push_back(rec(rng.uniform(0.0, 1.0), rng.uniform_int(2)));
  CHECK(auroc(rs) == Catch::Approx(0.5).margin(0.05));
}

TEST_CASE("six-segment example matches the pair count") {
  // on-body scores 0.9 0.8 0.4 against off-body 0.7 0.3 0.2: the 0.4 segment
  // loses only to 0.7, so 8 of the 9 ordered pairs rank correctly
  std::vector<PredictionRecord> rs{rec(0.9, 1), rec(0.8, 1), rec(0.4, 1),
                                   rec(0.7, 0), rec(0.3, 0), rec(0.2, 0)};
  const double a = auroc(rs);
  CHECK(a == Catch::Approx(8.0 / 9.0).margin(1e-9));
  CHECK(a == Catch::Approx(oracles::auroc_pairs({0.9, 0.8, 0.4},
                                                {0.7, 0.3, 0.2}))
                 .margin(1e-12));
}

TEST_CASE("sweep area equals the pair statistic on random sets") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_on = 1 + rng.uniform_int(60);
    const int n_off = 1 + rng.uniform_int(60);
    std::vector<double> on, off;
    std::vector<PredictionRecord> rs;
    for (int i = 0; i < n_on; ++i) {
      // quantized scores so ties actually occur
      const double s = rng.uniform_int(11) / 10.0;
      on.push_back(s);
      rs.push_back(rec(s, 1));
    }
    for (int i = 0; i < n_off; ++i) {
      const double s = rng.uniform_int(11) / 10.0;
      off.push_back(s);
      rs.push_back(rec(s, 0));
    }
    INFO("trial " << trial << " n_on " << n_on << " n_off " << n_off);
    CHECK(std::abs(auroc(rs) - oracles::auroc_pairs(on, off)) < 1e-9);
  }
}

TEST_CASE("roc curve is monotone and anchored") {
  Rng rng(23);
  std::vector<PredictionRecord> rs;
  for (int i = 0; i < 200; ++i)
    rs.push_back(rec(rng.uniform_int(21) / 20.0, rng.uniform_int(2)));
  const auto curve = roc(rs);
  REQUIRE(curve.size() >= 2);
  CHECK(curve.front().fp_rate == 0.0);
  CHECK(curve.front().tp_rate == 0.0);
  CHECK(curve.back().fp_rate == 1.0);
  CHECK(curve.back().tp_rate == 1.0);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].fp_rate >= curve[i - 1].fp_rate);
    CHECK(curve[i].tp_rate >= curve[i - 1].tp_rate);
    CHECK(curve[i].threshold < curve[i - 1].threshold);
  }
}

TEST_CASE("csv and svg emitters produce well-formed output") {
  std::vector<PredictionRecord> rs{rec(0.9, 1), rec(0.8, 1), rec(0.4, 1),
                                   rec(0.7, 0), rec(0.3, 0), rec(0.2, 0)};
  const auto curve = roc(rs);

  std::ostringstream csv;
  write_roc_csv(csv, curve);
  const std::string s = csv.str();
  CHECK(s.rfind("threshold,fp_rate,tp_rate\n", 0) == 0);
  CHECK(s.find("inf,0.000000000,0.000000000") != std::string::npos);
  CHECK(s.find("-inf,1.000000000,1.000000000") != std::string::npos);

  std::ostringstream svg;
  write_roc_svg(svg, curve, "held-out segments");
  const std::string g = svg.str();
  CHECK(g.find("<svg") != std::string::npos);
  CHECK(g.find("<polyline") != std::string::npos);
  CHECK(g.find("held-out segments") != std::string::npos);
  CHECK(g.find("<script") == std::string::npos);

  std::ostringstream series;
  write_series_svg(series, {{"a", {1.0, 0.5, 0.2}}, {"b", {0.1, 0.2, 0.3}}});
  CHECK(series.str().find("<polyline") != std::string::npos);

  nlohmann::json j = metrics_to_json(metrics(rs));
  CHECK(j["count"] == 6);
  CHECK(j.contains("tp_rate"));
  const Metrics on_only = metrics({rec(0.9, 1)});
  CHECK_FALSE(metrics_to_json(on_only).contains("fp_rate"));
}
