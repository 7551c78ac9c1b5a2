// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0

#include "banauth/channel.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <map>
#include <vector>

#include "banauth/dsp.hpp"

using namespace banauth;
using Catch::Matchers::WithinAbs;

namespace {

double variance(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

// fraction of (mean-removed) spectral energy above 15 Hz
double high_band_fraction(const RssTrace& tr) {
  double lo = 0.0, hi = 0.0;
  const auto& s = tr.signal.samples;
  for (std::size_t w = 0; w + 1000 <= s.size(); w += 1000) {
    std::vector<double> win(s.begin() + w, s.begin() + w + 1000);
    double m = 0.0;
    for (double x : win) m += x;
    m /= 1000.0;
    for (double& x : win) x -= m;
    const auto sp = fft_magnitude(win, 1000, 500.0);
    for (std::size_t k = 1; k <= 30; ++k) lo += sp.magnitude[k] * sp.magnitude[k];
    for (std::size_t k = 31; k < sp.magnitude.size(); ++k)
      hi += sp.magnitude[k] * sp.magnitude[k];
  }
  return hi / (lo + hi);
}

std::vector<double> to_db(const std::vector<double>& atten) {
  std::vector<double> db(atten.size());
  for (std::size_t i = 0; i < atten.size(); ++i) db[i] = 20.0 * std::log10(atten[i]);
  return db;
}

}  // namespace

TEST_CASE("creeping-wave field magnitude closed form", "[channel][field]") {
  CreepingWaveParams p;
  p.eta = 2.0 * kPi;
  p.d_m = 1.0;
  p.p_tx_w = 1.0;
  p.g_tx = 1.0;
  REQUIRE_THAT(creeping_field_magnitude(p, 1.0), WithinAbs(2.0, 1e-12));

  CreepingWaveParams p2 = p;
  p2.d_m = 2.0;
  const double drop_db =
      20.0 * std::log10(creeping_field_magnitude(p, 1.0) /
                        creeping_field_magnitude(p2, 1.0));
  REQUIRE_THAT(drop_db, WithinAbs(6.02, 0.01));

  const double atten_db =
      20.0 * std::log10(creeping_field_magnitude(p, 1.0) /
                        creeping_field_magnitude(p, 0.5));
  REQUIRE_THAT(atten_db, WithinAbs(6.02, 0.01));

  REQUIRE(std::abs(creeping_field(p, 1.0)) ==
          creeping_field_magnitude(p, 1.0));
}

TEST_CASE("creeping-wave field rejects invalid inputs", "[channel][field]") {
  CreepingWaveParams p;
  REQUIRE_THROWS_AS(creeping_field_magnitude(p, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(creeping_field_magnitude(p, 1.5), std::invalid_argument);
  CreepingWaveParams bad = p;
  bad.d_m = 0.0;
  REQUIRE_THROWS_AS(creeping_field_magnitude(bad, 1.0), std::invalid_argument);
}

TEST_CASE("attenuation trajectories stay inside (0, 1]", "[channel][motion]") {
  for (int z = 0; z < kNumMotionLabels; ++z) {
    const auto a = attenuation_model(static_cast<MotionClass>(z), 20.0, 500.0, 42);
    REQUIRE(a.size() == 10000);
    for (double v : a) {
      REQUIRE(v > 0.0);
      REQUIRE(v <= 1.0);
    }
  }
}

TEST_CASE("static postures modulate less than walking", "[channel][motion]") {
  const auto sit = to_db(attenuation_model(MotionClass::sitting, 20.0, 500.0, 5));
  const auto walk = to_db(attenuation_model(MotionClass::walking, 20.0, 500.0, 5));
  REQUIRE(variance(sit) < 0.5);
  REQUIRE(variance(walk) > variance(sit) + 6.0);
}

TEST_CASE("walking attenuation peaks near the gait frequency", "[channel][motion]") {
  const auto db = to_db(attenuation_model(MotionClass::walking, 10.0, 500.0, 17));
  std::vector<double> win(db);
  double m = 0.0;
  for (double x : win) m += x;
  m /= static_cast<double>(win.size());
  for (double& x : win) x -= m;
  const auto sp = fft_magnitude(win, win.size(), 500.0);  // 0.1 Hz bins
  std::size_t best = 0;
  double best_mag = -1.0;
  for (std::size_t k = 7; k * sp.bin_hz <= 15.0; ++k) {
    if (sp.magnitude[k] > best_mag) {
      best_mag = sp.magnitude[k];
      best = k;
    }
  }
  const double peak_hz = static_cast<double>(best) * sp.bin_hz;
  REQUIRE(peak_hz > 1.7);
  REQUIRE(peak_hz < 2.3);
}

TEST_CASE("uncontrolled motion mixes several signatures", "[channel][motion]") {
  // over a minute the generator should switch signatures at least once;
  // windows differ either in modulation power or in dominant frequency
  int distinct_total = 0;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const auto db = to_db(attenuation_model(MotionClass::uncontrolled, 60.0, 500.0, seed));
    std::map<int, int> kinds;
    for (std::size_t w = 0; w + 5000 <= db.size(); w += 5000) {
      std::vector<double> win(db.begin() + w, db.begin() + w + 5000);
      const double rms = std::sqrt(variance(win));
      if (rms < 1.0) {
        kinds[0]++;  // static posture
        continue;
      }
      double m = 0.0;
      for (double x : win) m += x;
      m /= static_cast<double>(win.size());
      for (double& x : win) x -= m;
      const auto sp = fft_magnitude(win, win.size(), 500.0);
      std::size_t best = 0;
      double best_mag = -1.0;
      for (std::size_t k = 3; k * sp.bin_hz <= 15.0; ++k)
        if (sp.magnitude[k] > best_mag) best_mag = sp.magnitude[k], best = k;
      const double peak = static_cast<double>(best) * sp.bin_hz;
      kinds[peak < 0.75 ? 1 : peak < 1.5 ? 2 : 3]++;
    }
    distinct_total += static_cast<int>(kinds.size());
  }
  REQUIRE(distinct_total >= 6);  // at least two signatures per seed on average
}

TEST_CASE("trace generation is bit-deterministic per seed", "[channel][trace]") {
  const auto a = gen_onbody_trace(MotionClass::walking, Environment::office, 10.0, 500.0, 99);
  const auto b = gen_onbody_trace(MotionClass::walking, Environment::office, 10.0, 500.0, 99);
  REQUIRE(a.signal.samples == b.signal.samples);
  const auto c = gen_offbody_trace(Environment::park, 10.0, 500.0, 31);
  const auto d = gen_offbody_trace(Environment::park, 10.0, 500.0, 31);
  REQUIRE(c.signal.samples == d.signal.samples);
  const auto e = gen_onbody_trace(MotionClass::walking, Environment::office, 10.0, 500.0, 100);
  REQUIRE(a.signal.samples != e.signal.samples);

  const auto m1 = attenuation_model(MotionClass::rotating, 5.0, 500.0, 7);
  const auto m2 = attenuation_model(MotionClass::rotating, 5.0, 500.0, 7);
  REQUIRE(m1 == m2);
}

TEST_CASE("trace generation rejects bad durations", "[channel][trace]") {
  REQUIRE_THROWS_AS(gen_onbody_trace(MotionClass::sitting, Environment::park, 0.0, 500.0, 1),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(gen_offbody_trace(Environment::park, 10.0, 0.0, 1),
                    std::invalid_argument);
}

TEST_CASE("trace labels and value range", "[channel][trace]") {
  const auto on = gen_onbody_trace(MotionClass::arm_moving, Environment::rooftop, 10.0, 500.0, 3);
  REQUIRE(on.y == OnOff::on);
  REQUIRE(on.z == MotionClass::arm_moving);
  REQUIRE(on.v == Environment::rooftop);
  const auto off = gen_offbody_trace(Environment::corridor, 10.0, 500.0, 4);
  REQUIRE(off.y == OnOff::off);
  REQUIRE(off.z == MotionClass::walking);

  for (std::uint64_t s = 0; s < 25; ++s) {
    for (const auto& tr :
         {gen_onbody_trace(MotionClass::walking, Environment::corridor, 10.0, 500.0, s),
          gen_offbody_trace(Environment::corridor, 10.0, 500.0, 1000 + s)}) {
      for (double v : tr.signal.samples) {
        REQUIRE(std::isfinite(v));
        REQUIRE(v >= -110.0);
        REQUIRE(v <= -20.0);
      }
    }
  }
}

TEST_CASE("on-body static traces are much quieter than off-body",
          "[channel][trace]") {
  double v_sit = 0.0, v_walk = 0.0, v_off = 0.0;
  constexpr int kSeeds = 20;
  for (int i = 0; i < kSeeds; ++i) {
    v_sit += variance(gen_onbody_trace(MotionClass::sitting, Environment::office,
                                       20.0, 500.0, 100 + i).signal.samples);
    v_walk += variance(gen_onbody_trace(MotionClass::walking, Environment::office,
                                        20.0, 500.0, 200 + i).signal.samples);
    v_off += variance(gen_offbody_trace(Environment::office, 20.0, 500.0, 300 + i)
                          .signal.samples);
  }
  v_sit /= kSeeds;
  v_walk /= kSeeds;
  v_off /= kSeeds;
  REQUIRE(v_sit < v_off);
  REQUIRE(v_walk - v_sit >= 6.0);
}

TEST_CASE("off-body traces carry more energy above 15 Hz", "[channel][trace]") {
  for (int v = 0; v < kNumEnvironments; ++v) {
    const auto env = static_cast<Environment>(v);
    double on_mean = 0.0, off_mean = 0.0, on_max = 0.0, off_min = 1.0;
    constexpr int kSeeds = 25;
    for (int i = 0; i < kSeeds; ++i) {
      const double a = high_band_fraction(
          gen_onbody_trace(MotionClass::standing, env, 20.0, 500.0, 40 * v + i));
      const double b = high_band_fraction(
          gen_offbody_trace(env, 20.0, 500.0, 5000 + 40 * v + i));
      on_mean += a;
      off_mean += b;
      on_max = std::max(on_max, a);
      off_min = std::min(off_min, b);
    }
    REQUIRE(off_mean / kSeeds > on_mean / kSeeds);
    REQUIRE(on_max < 0.08);
    REQUIRE(off_min > 0.10);
  }
}

TEST_CASE("rich scattering beats strong line of sight above 15 Hz",
          "[channel][trace]") {
  double park = 0.0, corridor = 0.0;
  constexpr int kSeeds = 50;
  for (int i = 0; i < kSeeds; ++i) {
    park += high_band_fraction(gen_offbody_trace(Environment::park, 20.0, 500.0, 7000 + i));
    corridor += high_band_fraction(
        gen_offbody_trace(Environment::corridor, 20.0, 500.0, 7100 + i));
  }
  REQUIRE(park / kSeeds < corridor / kSeeds);
}

TEST_CASE("dataset generation arithmetic and balance", "[channel][dataset]") {
  DatasetSpec spec;
  spec.traces_per_cell = 20;
  spec.uncontrolled_per_env = 0;
  spec.duration_s = 0.1;
  const auto data = gen_dataset(spec, 1);
  REQUIRE(data.size() == 1000);  // 5 motions x 5 environments x 2 classes x 20

  int n_on = 0;
  for (const auto& tr : data) n_on += (tr.y == OnOff::on) ? 1 : 0;
  REQUIRE(n_on * 2 == static_cast<int>(data.size()));
}

TEST_CASE("dataset labels are seed independent, samples are not",
          "[channel][dataset]") {
  DatasetSpec spec;
  spec.traces_per_cell = 2;
  spec.uncontrolled_per_env = 1;
  spec.duration_s = 0.5;
  const auto a = gen_dataset(spec, 1);
  const auto b = gen_dataset(spec, 2);
  const auto a2 = gen_dataset(spec, 1);
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() == 2 * (5 * 5 * 2 + 5 * 1));

  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].y == b[i].y);
    REQUIRE(a[i].z == b[i].z);
    REQUIRE(a[i].v == b[i].v);
    REQUIRE(a[i].signal.samples == a2[i].signal.samples);
    if (a[i].signal.samples != b[i].signal.samples) any_diff = true;
  }
  REQUIRE(any_diff);

  int unc = 0;
  for (const auto& tr : a)
    if (tr.z == MotionClass::uncontrolled) {
      ++unc;
      // uncontrolled sessions contribute both legitimate and attack traces
    }
  REQUIRE(unc == 10);
  int unc_off = 0;
  for (const auto& tr : a)
    if (tr.z == MotionClass::uncontrolled && tr.y == OnOff::off) ++unc_off;
  REQUIRE(unc_off == 5);
}

TEST_CASE("label names round-trip", "[channel][labels]") {
  for (int i = 0; i < kNumMotionLabels; ++i) {
    const auto z = static_cast<MotionClass>(i);
    REQUIRE(parse_motion(motion_name(z)) == z);
  }
  for (int i = 0; i < kNumEnvironments; ++i) {
    const auto v = static_cast<Environment>(i);
    REQUIRE(parse_environment(environment_name(v)) == v);
  }
  REQUIRE_THROWS_AS(parse_motion("flying"), std::invalid_argument);
  REQUIRE_THROWS_AS(parse_environment("ocean"), std::invalid_argument);
}
