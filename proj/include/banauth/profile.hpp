// banauth: propagation profile extraction from RSS traces
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0
//
// A 5 s trace segment becomes a 380-value propagation profile:
//   180 time-domain values: 3 frequency scales x 10 chunks x 6 statistics
//   160 spectral values: 4 STFT windows x 40 frequency intervals
//    40 percentage contributions of the 40 intervals
// Layout is fixed: time features first (scale-major, then chunk, then
// statistic), then the interval matrix row-major, then the contributions.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "banauth/channel.hpp"
#include "banauth/dsp.hpp"

namespace banauth {

inline constexpr int kProfileDim = 380;
inline constexpr int kTimeFeatureDim = 180;
inline constexpr int kNumChunks = 10;
inline constexpr int kNumStftWindows = 4;
inline constexpr int kNumIntervals = 40;
inline constexpr int kNumLowIntervals = 30;
inline constexpr std::size_t kStftSize = 1000;
inline constexpr std::size_t kStftShift = 500;
inline constexpr double kBandLowHz = 0.5;
inline constexpr double kBandHighHz = 15.0;
inline constexpr int kFirTaps = 501;

struct BandDecomposition {
  Signal low;   // below 0.5 Hz
  Signal band;  // 0.5 - 15 Hz
  Signal high;  // above 15 Hz
};

struct SpectralSummary {
  // interval energy matrix, window-major: m[w * 40 + j]
  std::array<double, kNumStftWindows * kNumIntervals> m{};
  // percentage contribution of each interval across all windows
  std::array<double, kNumIntervals> pc{};
};

struct PropagationProfile {
  std::vector<double> features;  // 380 values
  OnOff y = OnOff::off;
  MotionClass z = MotionClass::walking;
  Environment v = Environment::laboratory;
};

// Fixed-length segmentation; the tail shorter than one segment is dropped.
inline std::vector<Signal> segment(const Signal& trace, double segment_s) {
  if (trace.sample_rate_hz <= 0.0)
    throw std::invalid_argument("segment: sample rate must be positive");
  if (segment_s <= 0.0) throw std::invalid_argument("segment: length must be positive");
  const std::size_t seg_n =
      static_cast<std::size_t>(std::llround(segment_s * trace.sample_rate_hz));
  if (seg_n == 0 || trace.samples.size() < seg_n)
    throw std::invalid_argument("segment: trace shorter than one segment");
  std::vector<Signal> out;
  out.reserve(trace.samples.size() / seg_n);
  for (std::size_t s = 0; s + seg_n <= trace.samples.size(); s += seg_n) {
    Signal seg;
    seg.sample_rate_hz = trace.sample_rate_hz;
    seg.samples.assign(trace.samples.begin() + s, trace.samples.begin() + s + seg_n);
    out.push_back(std::move(seg));
  }
  return out;
}

namespace detail {

struct BandKernels {
  FilterKernel low, band, high;
};

inline const BandKernels& band_kernels(double fs) {
  static thread_local std::map<double, BandKernels> cache;
  auto it = cache.find(fs);
  if (it == cache.end()) {
    BandKernels k;
    k.low = design_fir(BandKind::low_pass, 0.0, kBandLowHz, kFirTaps, fs);
    k.band = design_fir(BandKind::band_pass, kBandLowHz, kBandHighHz, kFirTaps, fs);
    k.high = design_fir(BandKind::high_pass, kBandHighHz, 0.0, kFirTaps, fs);
    it = cache.emplace(fs, std::move(k)).first;
  }
  return it->second;
}

// Interval index of FFT bin k (n = 1000, fs = 500 Hz, centers at 0.5k Hz).
// The 30 low intervals split [0, 15] in 0.5 Hz steps, half-open on the
// right except the last, which closes at 15. The 10 high intervals split
// (15, 250] in 23.5 Hz steps, half-open on the left. Integer arithmetic on
// the bin index realizes exactly that convention.
inline int interval_of_bin(std::size_t k) {
  if (k <= 30) return static_cast<int>(std::min<std::size_t>(k, 29));
  return 30 + static_cast<int>((k - 31) / 47);
}

}  // namespace detail

// Split a segment into the three analysis scales with one shared FIR design
// per scale. The three kernels sum to the unit impulse, so the bands add
// back to the input.
inline BandDecomposition decompose(const Signal& seg) {
  const auto& k = detail::band_kernels(seg.sample_rate_hz);
  BandDecomposition d;
  d.low = apply_filter(seg, k.low);
  d.band = apply_filter(seg, k.band);
  d.high = apply_filter(seg, k.high);
  return d;
}

// 180 time-domain features: for each scale (low, band, high), split into 10
// equal chunks and take (max, min, median, variance, kurtosis, skewness).
inline std::vector<double> time_features(const BandDecomposition& d) {
  const std::array<const Signal*, 3> scales = {&d.low, &d.band, &d.high};
  std::vector<double> out;
  out.reserve(kTimeFeatureDim);
  for (const Signal* sc : scales) {
    const std::size_t n = sc->samples.size();
    if (n < kNumChunks || n % kNumChunks != 0)
      throw std::invalid_argument("time_features: scale length not divisible into 10 chunks");
    const std::size_t chunk_n = n / kNumChunks;
    for (int c = 0; c < kNumChunks; ++c) {
      std::vector<double> chunk(sc->samples.begin() + c * chunk_n,
                                sc->samples.begin() + (c + 1) * chunk_n);
      const auto s = stats6(chunk);
      for (double v : s.to_array()) out.push_back(v);
    }
  }
  return out;
}

// 4-window STFT energy summary. Windows start at 0, 500, 1000, 1500 samples
// (2 s windows shifted by 1 s); each spectrum's 501 bin magnitudes are
// summed into 40 frequency intervals. pc holds each interval's share of the
// total; a flat 1/40 when the segment has no energy at all.
inline SpectralSummary spectral_matrix(const Signal& seg) {
  if (seg.samples.size() < kStftSize + (kNumStftWindows - 1) * kStftShift)
    throw std::invalid_argument("spectral_matrix: segment shorter than the window layout");
  SpectralSummary out;
  for (int w = 0; w < kNumStftWindows; ++w) {
    const std::size_t off = static_cast<std::size_t>(w) * kStftShift;
    std::vector<double> win(seg.samples.begin() + off,
                            seg.samples.begin() + off + kStftSize);
    const auto sp = fft_magnitude(win, kStftSize, seg.sample_rate_hz);
    for (std::size_t k = 0; k < sp.magnitude.size(); ++k)
      out.m[w * kNumIntervals + detail::interval_of_bin(k)] += sp.magnitude[k];
  }
  double total = 0.0;
  for (int j = 0; j < kNumIntervals; ++j) {
    double col = 0.0;
    for (int w = 0; w < kNumStftWindows; ++w) col += out.m[w * kNumIntervals + j];
    out.pc[j] = col;
    total += col;
  }
  if (total > 0.0) {
    for (double& v : out.pc) v /= total;
  } else {
    for (double& v : out.pc) v = 1.0 / kNumIntervals;
  }
  return out;
}

// 200 frequency-domain features: the window/interval matrix row-major, then
// the 40 percentage contributions.
inline std::vector<double> freq_features(const SpectralSummary& s) {
  std::vector<double> out;
  out.reserve(kNumStftWindows * kNumIntervals + kNumIntervals);
  out.insert(out.end(), s.m.begin(), s.m.end());
  out.insert(out.end(), s.pc.begin(), s.pc.end());
  return out;
}

inline PropagationProfile build_profile(const Signal& seg, OnOff y, MotionClass z,
                                        Environment v) {
  PropagationProfile p;
  p.y = y;
  p.z = z;
  p.v = v;
  p.features = time_features(decompose(seg));
  const auto fr = freq_features(spectral_matrix(seg));
  p.features.insert(p.features.end(), fr.begin(), fr.end());
  if (p.features.size() != kProfileDim)
    throw std::logic_error("build_profile: feature layout out of sync");
  return p;
}

inline std::vector<PropagationProfile> profiles_from_trace(const RssTrace& tr,
                                                           double segment_s) {
  std::vector<PropagationProfile> out;
  for (const auto& seg : segment(tr.signal, segment_s))
    out.push_back(build_profile(seg, tr.y, tr.z, tr.v));
  return out;
}

// Per-dimension z-score normalizer. Fit on training profiles only; the
// standard deviation is clamped below at 1e-8 so constant features stay
// finite.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  static Normalizer fit(const std::vector<PropagationProfile>& profiles) {
    if (profiles.empty()) throw std::invalid_argument("Normalizer: no profiles to fit");
    const std::size_t dim = profiles.front().features.size();
    Normalizer nz;
    nz.mean.assign(dim, 0.0);
    nz.stddev.assign(dim, 0.0);
    for (const auto& p : profiles) {
      if (p.features.size() != dim)
        throw std::invalid_argument("Normalizer: inconsistent feature length");
      for (std::size_t i = 0; i < dim; ++i) nz.mean[i] += p.features[i];
    }
    for (double& m : nz.mean) m /= static_cast<double>(profiles.size());
    for (const auto& p : profiles)
      for (std::size_t i = 0; i < dim; ++i) {
        const double d = p.features[i] - nz.mean[i];
        nz.stddev[i] += d * d;
      }
    for (double& s : nz.stddev)
      s = std::max(std::sqrt(s / static_cast<double>(profiles.size())), 1e-8);
    return nz;
  }

  std::vector<double> apply(const std::vector<double>& features) const {
    if (features.size() != mean.size())
      throw std::invalid_argument("Normalizer: feature length mismatch");
    std::vector<double> out(features.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = (features[i] - mean[i]) / stddev[i];
    return out;
  }

  void apply_in_place(PropagationProfile& p) const { p.features = apply(p.features); }
};

}  // namespace banauth
