// banauth: RSS trace simulator for on-body and off-body transmitters
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0
//
// On-body traces follow a creeping-wave surface propagation model whose
// attenuation factor is modulated by body motion; off-body traces follow
// log-distance path loss with Rician small-scale fading. All randomness is
// drawn from a per-trace xoshiro256++ generator, so every trace is fully
// reproducible from (seed, trace index).

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "banauth/dsp.hpp"
#include "banauth/rng.hpp"

namespace banauth {

enum class OnOff : int { off = 0, on = 1 };

enum class MotionClass : int {
  sitting = 0,
  standing = 1,
  arm_moving = 2,
  rotating = 3,
  walking = 4,
  uncontrolled = 5,  // free mixture of the controlled motions; test data only
};

enum class Environment : int {
  laboratory = 0,
  office = 1,
  corridor = 2,
  rooftop = 3,
  park = 4,
};

inline constexpr int kNumControlledMotions = 5;
inline constexpr int kNumMotionLabels = 6;
inline constexpr int kNumEnvironments = 5;

struct EnvironmentTraits {
  double rician_k;          // small-scale fading K-factor (linear)
  double noise_floor_dbm;   // receiver sees max(signal, floor) energy-wise
  double meas_noise_db;     // RSSI readout noise, std dev in dB
  bool indoor;              // indoor environments shadow harder
};

inline const EnvironmentTraits& environment_traits(Environment v) {
  static const EnvironmentTraits table[kNumEnvironments] = {
      {2.0, -92.0, 0.30, true},   // laboratory
      {3.0, -90.0, 0.20, true},   // office
      {1.0, -88.0, 0.40, true},   // corridor
      {6.0, -97.0, 0.15, false},  // rooftop
      {8.0, -99.0, 0.10, false},  // park
  };
  return table[static_cast<int>(v)];
}

inline const char* motion_name(MotionClass z) {
  static const char* names[] = {"sitting",  "standing",     "arm_moving",
                                "rotating", "walking",      "uncontrolled"};
  return names[static_cast<int>(z)];
}

inline const char* environment_name(Environment v) {
  static const char* names[] = {"laboratory", "office", "corridor", "rooftop",
                                "park"};
  return names[static_cast<int>(v)];
}

inline MotionClass parse_motion(const std::string& s) {
  for (int i = 0; i < kNumMotionLabels; ++i)
    if (s == motion_name(static_cast<MotionClass>(i)))
      return static_cast<MotionClass>(i);
  throw std::invalid_argument("unknown motion class: " + s);
}

inline Environment parse_environment(const std::string& s) {
  for (int i = 0; i < kNumEnvironments; ++i)
    if (s == environment_name(static_cast<Environment>(i)))
      return static_cast<Environment>(i);
  throw std::invalid_argument("unknown environment: " + s);
}

struct CreepingWaveParams {
  double p_tx_w = 1e-3;       // transmit power, watts
  double g_tx = 1.0;          // transmit antenna gain
  double d_m = 0.4;           // surface distance transmitter -> receiver
  double eta = 376.730313668; // medium impedance, ohms
  double wavenumber = 50.293; // 2*pi*f/c at 2.4 GHz
  double a_m = 0.20;          // body cross-section semi-axes
  double b_m = 0.25;
  double phi = 0.0;           // angular positions on the body surface
  double varphi = 0.0;
};

// |E| = 2 * sqrt(eta / 2pi) * sqrt(P G) / d * attenuation. The geometry
// dependent surface loss enters through `attenuation`.
inline double creeping_field_magnitude(const CreepingWaveParams& p,
                                       double attenuation) {
  if (!(attenuation > 0.0 && attenuation <= 1.0))
    throw std::invalid_argument("creeping_field_magnitude: attenuation outside (0, 1]");
  if (p.d_m <= 0.0) throw std::invalid_argument("creeping_field_magnitude: d must be positive");
  if (p.eta <= 0.0) throw std::invalid_argument("creeping_field_magnitude: eta must be positive");
  if (p.p_tx_w < 0.0 || p.g_tx < 0.0)
    throw std::invalid_argument("creeping_field_magnitude: negative power or gain");
  return 2.0 * std::sqrt(p.eta / (2.0 * kPi)) * std::sqrt(p.p_tx_w * p.g_tx) /
         p.d_m * attenuation;
}

inline std::complex<double> creeping_field(const CreepingWaveParams& p,
                                           double attenuation) {
  const double mag = creeping_field_magnitude(p, attenuation);
  const double ph = -p.wavenumber * p.d_m;
  return {mag * std::cos(ph), mag * std::sin(ph)};
}

struct RssTrace {
  Signal signal;
  OnOff y = OnOff::off;
  MotionClass z = MotionClass::walking;
  Environment v = Environment::laboratory;
  std::uint64_t seed = 0;
};

namespace detail {

struct Sinusoid {
  double amp_db;
  double freq_hz;
  double phase;
};

// Per-class motion signature: strong fundamental plus one harmonic for the
// dynamic motions, slow sub-band wander for the static postures, and a
// band-limited jitter floor. Amplitudes are in dB of attenuation.
inline std::vector<Sinusoid> motion_sinusoids(MotionClass z, Rng& rng) {
  std::vector<Sinusoid> out;
  const auto tone = [&](double amp, double freq, double fjit) {
    out.push_back({amp, freq * rng.uniform(1.0 - fjit, 1.0 + fjit),
                   rng.uniform(0.0, 2.0 * kPi)});
  };
  double jitter_rms = 0.0;
  switch (z) {
    case MotionClass::sitting:
      tone(0.25, 0.15, 0.3);
      tone(0.15, 0.35, 0.3);
      jitter_rms = 0.05;
      break;
    case MotionClass::standing:
      tone(0.30, 0.10, 0.3);
      tone(0.18, 0.30, 0.3);
      tone(0.10, 0.70, 0.2);
      jitter_rms = 0.07;
      break;
    case MotionClass::arm_moving:
      tone(4.5, 1.0, 0.05);
      tone(1.2, 2.0, 0.05);
      jitter_rms = 0.8;
      break;
    case MotionClass::rotating:
      tone(4.8, 0.5, 0.05);
      tone(1.0, 1.0, 0.05);
      jitter_rms = 0.7;
      break;
    case MotionClass::walking:
      tone(4.2, 2.0, 0.05);
      tone(1.7, 4.0, 0.05);
      jitter_rms = 0.9;
      break;
    case MotionClass::uncontrolled:
      throw std::invalid_argument("motion_sinusoids: uncontrolled is a mixture, not a signature");
  }
  // jitter floor: eight tones spread through the motion band
  constexpr int kJitterTones = 8;
  const double amp = jitter_rms * std::sqrt(2.0 / kJitterTones);
  for (int i = 0; i < kJitterTones; ++i)
    out.push_back({amp, rng.uniform(0.6, 14.0), rng.uniform(0.0, 2.0 * kPi)});
  return out;
}

inline void add_sinusoids_db(std::vector<double>& mod_db, std::size_t start,
                             std::size_t count, double fs,
                             const std::vector<Sinusoid>& tones) {
  for (std::size_t i = start; i < start + count; ++i) {
    const double t = static_cast<double>(i) / fs;
    double acc = 0.0;
    for (const auto& s : tones)
      acc += s.amp_db * std::sin(2.0 * kPi * s.freq_hz * t + s.phase);
    mod_db[i] += acc;
  }
}

// Linear interpolation of a coarse grid of iid normals. Models the RSSI
// readout smoothing: the noise is band-limited to roughly grid_hz, so quiet
// on-body traces do not pick up wideband energy from the meter itself.
inline std::vector<double> smooth_noise(std::size_t n, double fs, double grid_hz,
                                        double sigma, Rng& rng) {
  const double step = fs / grid_hz;
  const std::size_t grid_n = static_cast<std::size_t>(std::ceil(static_cast<double>(n) / step)) + 2;
  std::vector<double> grid(grid_n);
  for (double& g : grid) g = rng.normal(0.0, sigma);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / step;
    const std::size_t i0 = static_cast<std::size_t>(x);
    const double f = x - static_cast<double>(i0);
    out[i] = (1.0 - f) * grid[i0] + f * grid[i0 + 1];
  }
  return out;
}

// Ornstein-Uhlenbeck trajectory on a coarse grid, linearly interpolated.
// Used for shadowing and for the attacker's distance random walk.
inline std::vector<double> ou_process(std::size_t n, double fs, double grid_hz,
                                      double sigma, double tau_s, Rng& rng) {
  const double dt = 1.0 / grid_hz;
  const double a = std::exp(-dt / tau_s);
  const double s = sigma * std::sqrt(1.0 - a * a);
  const double step = fs / grid_hz;
  const std::size_t grid_n = static_cast<std::size_t>(std::ceil(static_cast<double>(n) / step)) + 2;
  std::vector<double> grid(grid_n);
  grid[0] = rng.normal(0.0, sigma);
  for (std::size_t i = 1; i < grid_n; ++i) grid[i] = a * grid[i - 1] + rng.normal(0.0, s);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / step;
    const std::size_t i0 = static_cast<std::size_t>(x);
    const double f = x - static_cast<double>(i0);
    out[i] = (1.0 - f) * grid[i0] + f * grid[i0 + 1];
  }
  return out;
}

inline std::size_t sample_count(double duration_s, double fs) {
  if (duration_s <= 0.0) throw std::invalid_argument("trace duration must be positive");
  if (fs <= 0.0) throw std::invalid_argument("sample rate must be positive");
  const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * fs));
  if (n == 0) throw std::invalid_argument("trace duration too short for one sample");
  return n;
}

// Headroom between the strongest possible modulation excursion and 0 dB so
// the attenuation factor stays inside (0, 1] for every class.
inline constexpr double kMotionMarginDb = 12.0;

inline std::vector<double> motion_mod_db(MotionClass z, std::size_t n, double fs,
                                         Rng& rng) {
  std::vector<double> mod(n, 0.0);
  if (z != MotionClass::uncontrolled) {
    add_sinusoids_db(mod, 0, n, fs, motion_sinusoids(z, rng));
    return mod;
  }
  // uncontrolled: hold a controlled signature for 5-15 s, then switch, with
  // a half-second raised-cosine crossfade at each boundary
  const double fade_s = 0.5;
  const std::size_t fade_n = static_cast<std::size_t>(fade_s * fs);
  std::vector<double> weight(n, 0.0);
  std::vector<double> seg(n);
  std::size_t start = 0;
  std::vector<double> prev_tail;  // previous segment's samples inside the fade
  while (start < n) {
    const std::size_t seg_len = std::min(
        n - start, static_cast<std::size_t>(rng.uniform(5.0, 15.0) * fs));
    const MotionClass zc = static_cast<MotionClass>(rng.uniform_int(kNumControlledMotions));
    const auto tones = motion_sinusoids(zc, rng);
    std::fill(seg.begin(), seg.end(), 0.0);
    const std::size_t seg_end = std::min(n, start + seg_len + fade_n);
    add_sinusoids_db(seg, start, seg_end - start, fs, tones);
    for (std::size_t i = start; i < seg_end; ++i) {
      double w = 1.0;
      if (i < start + fade_n && start > 0)
        w = 0.5 - 0.5 * std::cos(kPi * static_cast<double>(i - start) / static_cast<double>(fade_n));
      else if (i >= start + seg_len)
        w = 0.5 + 0.5 * std::cos(kPi * static_cast<double>(i - start - seg_len) / static_cast<double>(fade_n));
      mod[i] += w * seg[i];
      weight[i] += w;
    }
    start += seg_len;
  }
  // fades at the boundaries pair up to weight 1; normalize any residue
  for (std::size_t i = 0; i < n; ++i)
    if (weight[i] > 1e-9 && std::abs(weight[i] - 1.0) > 1e-9) mod[i] /= weight[i];
  return mod;
}

}  // namespace detail

// Motion-driven attenuation factor trajectory, one value per sample, always
// inside (0, 1]. This trajectory plays the role of the angular/geometric
// loss term of the creeping-wave field expression.
inline std::vector<double> attenuation_model(MotionClass z, double duration_s,
                                             double fs, std::uint64_t seed) {
  const std::size_t n = detail::sample_count(duration_s, fs);
  Rng rng(seed);
  const auto mod = detail::motion_mod_db(z, n, fs, rng);
  std::vector<double> atten(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double db = std::min(0.0, mod[i] - detail::kMotionMarginDb);
    atten[i] = std::pow(10.0, db / 20.0);
  }
  return atten;
}

namespace detail {

// dBm calibration applied to 20*log10 |E| so typical on-body traces sit in
// the -70..-45 dBm range
inline constexpr double kOnBodyCalDb = -21.0;
inline constexpr double kOffBodyTxDbm = -48.0;  // attacker EIRP less fixed losses
inline constexpr double kRssFloorDbm = -110.0;
inline constexpr double kRssCeilDbm = -20.0;

inline double combine_with_floor(double rss_dbm, double floor_dbm) {
  const double lin = std::pow(10.0, rss_dbm / 10.0) + std::pow(10.0, floor_dbm / 10.0);
  return 10.0 * std::log10(lin);
}

}  // namespace detail

// On-body transmitter: creeping-wave baseline at a fixed surface distance,
// motion-modulated attenuation, receiver noise floor and readout noise.
inline RssTrace gen_onbody_trace(MotionClass z, Environment v, double duration_s,
                                 double fs, std::uint64_t seed) {
  const std::size_t n = detail::sample_count(duration_s, fs);
  Rng rng(seed);
  const auto& env = environment_traits(v);

  CreepingWaveParams p;
  p.d_m = rng.uniform(0.25, 0.55);
  p.phi = rng.uniform(0.0, kPi);
  p.varphi = rng.uniform(0.0, kPi);
  // surface loss shapes the distance law: field ~ 1/d from the explicit
  // factor times 1/d from the surface decay, i.e. a path-loss exponent of 4
  const double surface_loss = 0.1 / p.d_m;

  const auto mod = detail::motion_mod_db(static_cast<MotionClass>(z), n, fs, rng);
  const auto meas = detail::smooth_noise(n, fs, 25.0, env.meas_noise_db, rng);

  RssTrace tr;
  tr.y = OnOff::on;
  tr.z = z;
  tr.v = v;
  tr.seed = seed;
  tr.signal.sample_rate_hz = fs;
  tr.signal.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double db = std::min(0.0, mod[i] - detail::kMotionMarginDb);
    const double atten = surface_loss * std::pow(10.0, db / 20.0);
    const double e_mag = creeping_field_magnitude(p, atten);
    double rss = 20.0 * std::log10(e_mag) + detail::kOnBodyCalDb;
    rss = detail::combine_with_floor(rss, env.noise_floor_dbm) + meas[i];
    tr.signal.samples[i] = std::clamp(rss, detail::kRssFloorDbm, detail::kRssCeilDbm);
  }
  return tr;
}

// Off-body transmitter (attacker within a few meters): log-distance path
// loss over a bounded random walk, log-normal shadowing, Rician small-scale
// fading with environment K-factor, and a wideband dense-scatter residue
// that is stronger in low-K environments.
inline RssTrace gen_offbody_trace(Environment v, double duration_s, double fs,
                                  std::uint64_t seed) {
  const std::size_t n = detail::sample_count(duration_s, fs);
  Rng rng(seed);
  const auto& env = environment_traits(v);

  // pedestrian distance random walk, reflected into [1, 5] m
  std::vector<double> dist(n);
  {
    const auto vel = detail::ou_process(n, fs, 10.0, 0.7, 2.0, rng);
    double d = rng.uniform(1.5, 4.5);
    const double dt = 1.0 / fs;
    for (std::size_t i = 0; i < n; ++i) {
      d += std::clamp(vel[i], -1.5, 1.5) * dt;
      if (d < 1.0) d = 2.0 - d;
      if (d > 5.0) d = 10.0 - d;
      dist[i] = d;
    }
  }

  const auto shadow = detail::ou_process(n, fs, 4.0, env.indoor ? 4.0 : 2.0, 3.0, rng);

  // sum-of-sinusoids scattered component; specular-to-scatter ratio K
  constexpr int kRays = 16;
  const double k = env.rician_k;
  const double doppler_hz = rng.uniform(0.5, 1.5) / 0.125;  // v/lambda at 2.4 GHz
  std::array<double, kRays> ray_w{};
  std::array<double, kRays> ray_p{};
  for (int r = 0; r < kRays; ++r) {
    ray_w[r] = 2.0 * kPi * doppler_hz * std::cos(rng.uniform(0.0, 2.0 * kPi));
    ray_p[r] = rng.uniform(0.0, 2.0 * kPi);
  }
  const double spec = std::sqrt(k / (k + 1.0));
  const double scat = std::sqrt(1.0 / ((k + 1.0) * kRays));

  const double sigma_wide = 5.0 / std::sqrt(1.0 + k);
  const auto meas = detail::smooth_noise(n, fs, 25.0, env.meas_noise_db, rng);

  RssTrace tr;
  tr.y = OnOff::off;
  tr.z = MotionClass::walking;  // attacker motion placeholder
  tr.v = v;
  tr.seed = seed;
  tr.signal.sample_rate_hz = fs;
  tr.signal.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    double re = spec, im = 0.0;
    for (int r = 0; r < kRays; ++r) {
      const double ang = ray_w[r] * t + ray_p[r];
      re += scat * std::cos(ang);
      im += scat * std::sin(ang);
    }
    const double fade_db = 10.0 * std::log10(std::max(re * re + im * im, 1e-12));
    const double pl_db = 10.0 * 2.0 * std::log10(dist[i] / 1.0);
    double rss = detail::kOffBodyTxDbm - pl_db + shadow[i] + fade_db +
                 rng.normal(0.0, sigma_wide);
    rss = detail::combine_with_floor(rss, env.noise_floor_dbm) + meas[i];
    tr.signal.samples[i] = std::clamp(rss, detail::kRssFloorDbm, detail::kRssCeilDbm);
  }
  return tr;
}

// Dataset request: `traces_per_cell` traces for every controlled
// (motion, environment) cell, mirrored for off-body, plus
// `uncontrolled_per_env` on-body and off-body traces per environment that
// carry the uncontrolled motion label (test data only).
struct DatasetSpec {
  int traces_per_cell = 4;
  int uncontrolled_per_env = 0;
  double duration_s = 60.0;
  double sample_rate_hz = 500.0;
};

inline std::vector<RssTrace> gen_dataset(const DatasetSpec& spec,
                                         std::uint64_t seed) {
  if (spec.traces_per_cell < 0 || spec.uncontrolled_per_env < 0)
    throw std::invalid_argument("gen_dataset: negative trace count");
  std::vector<RssTrace> out;
  out.reserve(static_cast<std::size_t>(
      2 * (kNumControlledMotions * kNumEnvironments * spec.traces_per_cell +
           kNumEnvironments * spec.uncontrolled_per_env)));
  std::uint64_t index = 0;
  const auto next_seed = [&] { return sub_seed(seed, index++); };

  for (int z = 0; z < kNumControlledMotions; ++z)
    for (int v = 0; v < kNumEnvironments; ++v)
      for (int i = 0; i < spec.traces_per_cell; ++i)
        out.push_back(gen_onbody_trace(static_cast<MotionClass>(z),
                                       static_cast<Environment>(v),
                                       spec.duration_s, spec.sample_rate_hz,
                                       next_seed()));
  for (int z = 0; z < kNumControlledMotions; ++z)
    for (int v = 0; v < kNumEnvironments; ++v)
      for (int i = 0; i < spec.traces_per_cell; ++i) {
        (void)z;  // off-body traces do not depend on the victim's motion
        out.push_back(gen_offbody_trace(static_cast<Environment>(v),
                                        spec.duration_s, spec.sample_rate_hz,
                                        next_seed()));
      }
  for (int v = 0; v < kNumEnvironments; ++v)
    for (int i = 0; i < spec.uncontrolled_per_env; ++i)
      out.push_back(gen_onbody_trace(MotionClass::uncontrolled,
                                     static_cast<Environment>(v),
                                     spec.duration_s, spec.sample_rate_hz,
                                     next_seed()));
  for (int v = 0; v < kNumEnvironments; ++v)
    for (int i = 0; i < spec.uncontrolled_per_env; ++i) {
      RssTrace tr = gen_offbody_trace(static_cast<Environment>(v),
                                      spec.duration_s, spec.sample_rate_hz,
                                      next_seed());
      tr.z = MotionClass::uncontrolled;  // collected in the uncontrolled sessions
      out.push_back(std::move(tr));
    }
  return out;
}

}  // namespace banauth
