// banauth: sampled-signal primitives (FIR design, filtering, FFT, moments)
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace banauth {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

struct Signal {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;
};

enum class BandKind { low_pass, band_pass, high_pass };

struct FilterKernel {
  std::vector<double> taps;  // odd length, symmetric
  BandKind kind = BandKind::low_pass;
  double low_hz = 0.0;   // lower band edge (band_pass, high_pass)
  double high_hz = 0.0;  // upper band edge (low_pass, band_pass)
};

struct Spectrum {
  std::vector<double> magnitude;  // one-sided, n/2 + 1 bins
  double bin_hz = 0.0;
};

struct Stats6 {
  double max = 0.0;
  double min = 0.0;
  double median = 0.0;
  double variance = 0.0;  // population
  double kurtosis = 0.0;  // m4 / m2^2, zeroed when variance < 1e-12
  double skewness = 0.0;  // m3 / m2^1.5, zeroed when variance < 1e-12

  std::array<double, 6> to_array() const {
    return {max, min, median, variance, kurtosis, skewness};
  }
};

namespace detail {

// Hamming-windowed sinc low-pass, DC gain normalized to exactly 1.
// Taps are computed for one half and mirrored so symmetry is bitwise.
inline std::vector<double> windowed_sinc_lowpass(double cutoff_hz, int taps,
                                                 double fs) {
  const int m = (taps - 1) / 2;
  const double fc = cutoff_hz / fs;  // cycles per sample
  std::vector<double> h(taps);
  for (int n = 0; n <= m; ++n) {
    const int k = n - m;  // <= 0
    double v;
    if (k == 0) {
      v = 2.0 * fc;
    } else {
      v = std::sin(2.0 * kPi * fc * k) / (kPi * k);
    }
    const double w = 0.54 - 0.46 * std::cos(2.0 * kPi * n / (taps - 1));
    h[n] = v * w;
    h[taps - 1 - n] = v * w;
  }
  double sum = 0.0;
  for (double v : h) sum += v;
  for (double& v : h) v /= sum;
  return h;
}

}  // namespace detail

// Windowed-sinc FIR design (Hamming window). The three kinds are built from
// the same low-pass prototype, so low_pass(f0) + band_pass(f0, f1) +
// high_pass(f1) sums to the unit impulse exactly and the bands reconstruct
// the input.
inline FilterKernel design_fir(BandKind kind, double low_hz, double high_hz,
                               int taps, double fs) {
  if (fs <= 0.0) throw std::invalid_argument("design_fir: sample rate must be positive");
  if (taps < 3 || taps % 2 == 0)
    throw std::invalid_argument("design_fir: tap count must be odd and >= 3");
  const double nyquist = fs / 2.0;
  const auto check_edge = [&](double f) {
    if (!(f > 0.0 && f < nyquist))
      throw std::invalid_argument("design_fir: band edge outside (0, fs/2)");
  };

  FilterKernel k;
  k.kind = kind;
  k.low_hz = low_hz;
  k.high_hz = high_hz;
  switch (kind) {
    case BandKind::low_pass:
      check_edge(high_hz);
      k.low_hz = 0.0;
      k.taps = detail::windowed_sinc_lowpass(high_hz, taps, fs);
      break;
    case BandKind::band_pass: {
      check_edge(low_hz);
      check_edge(high_hz);
      if (low_hz >= high_hz)
        throw std::invalid_argument("design_fir: band edges must be ordered");
      k.taps = detail::windowed_sinc_lowpass(high_hz, taps, fs);
      const auto lo = detail::windowed_sinc_lowpass(low_hz, taps, fs);
      for (int i = 0; i < taps; ++i) k.taps[i] -= lo[i];
      break;
    }
    case BandKind::high_pass: {
      check_edge(low_hz);
      k.high_hz = nyquist;
      const auto lo = detail::windowed_sinc_lowpass(low_hz, taps, fs);
      k.taps.assign(taps, 0.0);
      for (int i = 0; i < taps; ++i) k.taps[i] = -lo[i];
      k.taps[(taps - 1) / 2] += 1.0;
      break;
    }
  }
  return k;
}

// Zero-phase FIR application: reflection padding (mirror without repeating
// the edge sample) plus group-delay compensation of (taps-1)/2, so the
// output aligns with the input and keeps its length.
inline Signal apply_filter(const Signal& x, const FilterKernel& kernel) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.samples.size());
  const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(kernel.taps.size());
  if (x.sample_rate_hz <= 0.0)
    throw std::invalid_argument("apply_filter: signal sample rate must be positive");
  if (n < t)
    throw std::invalid_argument("apply_filter: signal shorter than kernel");
  const std::ptrdiff_t m = (t - 1) / 2;

  Signal y;
  y.sample_rate_hz = x.sample_rate_hz;
  y.samples.resize(n);
  const double* xs = x.samples.data();
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const std::ptrdiff_t base = i - m;
    if (base >= 0 && base + t <= n) {
      for (std::ptrdiff_t j = 0; j < t; ++j) acc += kernel.taps[j] * xs[base + j];
    } else {
      for (std::ptrdiff_t j = 0; j < t; ++j) {
        std::ptrdiff_t idx = base + j;
        if (idx < 0) idx = -idx;
        if (idx >= n) idx = 2 * (n - 1) - idx;
        acc += kernel.taps[j] * xs[idx];
      }
    }
    y.samples[i] = acc;
  }
  return y;
}

namespace detail {

// Iterative radix-2 FFT for power-of-two sizes; Bluestein re-expression for
// everything else. Twiddles precomputed per size so repeated transforms of
// the same length (the 1000-sample analysis windows) reuse the tables.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    if (n_ == 0) throw std::invalid_argument("fft: size must be positive");
    if ((n_ & (n_ - 1)) == 0) {
      init_pow2_tables(n_);
    } else {
      m_ = 1;
      while (m_ < 2 * n_ - 1) m_ <<= 1;
      init_pow2_tables(m_);
      chirp_.resize(n_);
      for (std::size_t k = 0; k < n_; ++k) {
        // angle via k^2 mod 2n keeps the argument small for large k
        const std::size_t sq = (k * k) % (2 * n_);
        const double ang = kPi * static_cast<double>(sq) / static_cast<double>(n_);
        chirp_[k] = {std::cos(ang), -std::sin(ang)};
      }
      bfft_.assign(m_, {0.0, 0.0});
      bfft_[0] = std::conj(chirp_[0]);
      for (std::size_t k = 1; k < n_; ++k) {
        bfft_[k] = std::conj(chirp_[k]);
        bfft_[m_ - k] = std::conj(chirp_[k]);
      }
      pow2_transform(bfft_, false);
    }
  }

  std::size_t size() const { return n_; }

  void transform(std::vector<std::complex<double>>& a) const {
    if (a.size() != n_) throw std::invalid_argument("fft: length mismatch");
    if ((n_ & (n_ - 1)) == 0) {
      pow2_transform(a, false);
      return;
    }
    std::vector<std::complex<double>> b(m_, {0.0, 0.0});
    for (std::size_t k = 0; k < n_; ++k) b[k] = a[k] * chirp_[k];
    pow2_transform(b, false);
    for (std::size_t k = 0; k < m_; ++k) b[k] *= bfft_[k];
    pow2_transform(b, true);
    for (std::size_t k = 0; k < n_; ++k) a[k] = b[k] * chirp_[k];
  }

 private:
  void init_pow2_tables(std::size_t m) {
    tw_.resize(m / 2);
    for (std::size_t k = 0; k < m / 2; ++k) {
      const double ang = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
      tw_[k] = {std::cos(ang), std::sin(ang)};
    }
  }

  void pow2_transform(std::vector<std::complex<double>>& a, bool inverse) const {
    const std::size_t m = a.size();
    for (std::size_t i = 1, j = 0; i < m; ++i) {
      std::size_t bit = m >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= m; len <<= 1) {
      const std::size_t step = m / len;
      for (std::size_t i = 0; i < m; i += len) {
        for (std::size_t k = 0; k < len / 2; ++k) {
          std::complex<double> w = tw_[k * step];
          if (inverse) w = std::conj(w);
          const std::complex<double> u = a[i + k];
          const std::complex<double> v = a[i + k + len / 2] * w;
          a[i + k] = u + v;
          a[i + k + len / 2] = u - v;
        }
      }
    }
    if (inverse) {
      const double inv = 1.0 / static_cast<double>(m);
      for (auto& v : a) v *= inv;
    }
  }

  std::size_t n_ = 0;
  std::size_t m_ = 0;  // Bluestein convolution size (power of two)
  std::vector<std::complex<double>> tw_;
  std::vector<std::complex<double>> chirp_;
  std::vector<std::complex<double>> bfft_;
};

inline const Fft& fft_plan(std::size_t n) {
  static thread_local std::map<std::size_t, Fft> plans;
  auto it = plans.find(n);
  if (it == plans.end()) it = plans.emplace(n, Fft(n)).first;
  return it->second;
}

}  // namespace detail

inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> a) {
  detail::fft_plan(a.size()).transform(a);
  return a;
}

// One-sided magnitude spectrum of a real window. No scaling is applied:
// bin k holds |sum_t x[t] e^{-2 pi i k t / n}|, so a constant c gives
// magnitude n*|c| in bin 0.
inline Spectrum fft_magnitude(const std::vector<double>& window, std::size_t fft_size,
                              double fs) {
  if (window.size() != fft_size)
    throw std::invalid_argument("fft_magnitude: window length must equal fft size");
  if (fs <= 0.0) throw std::invalid_argument("fft_magnitude: sample rate must be positive");
  std::vector<std::complex<double>> a(fft_size);
  for (std::size_t i = 0; i < fft_size; ++i) a[i] = {window[i], 0.0};
  detail::fft_plan(fft_size).transform(a);
  Spectrum s;
  s.bin_hz = fs / static_cast<double>(fft_size);
  s.magnitude.resize(fft_size / 2 + 1);
  for (std::size_t k = 0; k < s.magnitude.size(); ++k) s.magnitude[k] = std::abs(a[k]);
  return s;
}

// Six summary statistics of a chunk: max, min, median, population variance,
// standardized kurtosis (m4/m2^2) and skewness (m3/m2^1.5). Near-constant
// chunks (variance < 1e-12) report kurtosis = skewness = 0 rather than the
// 0/0 blowup.
inline Stats6 stats6(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("stats6: empty chunk");
  const std::size_t n = v.size();
  Stats6 s;
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end());
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = (n % 2 == 1) ? sorted[n / 2]
                          : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  s.variance = m2;
  if (m2 < 1e-12) {
    s.kurtosis = 0.0;
    s.skewness = 0.0;
  } else {
    s.kurtosis = m4 / (m2 * m2);
    s.skewness = m3 / (m2 * std::sqrt(m2));
  }
  return s;
}

}  // namespace banauth
