// banauth: minimal differentiable kernel (conv1d, pooling, dense, losses)
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0
//
// Plain SGD, manual backward passes, no graph machinery. Tensors store
// samples channel-interleaved (value(c, t) = data[t * channels + c]) so the
// convolution inner loops run over contiguous memory. Every loop has a
// fixed iteration order; repeated runs produce bit-identical results.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "banauth/rng.hpp"

namespace banauth {

struct Tensor {
  int channels = 0;
  int length = 0;
  std::vector<double> data;

  static Tensor zeros(int channels, int length) {
    Tensor t;
    t.channels = channels;
    t.length = length;
    t.data.assign(static_cast<std::size_t>(channels) * length, 0.0);
    return t;
  }

  void resize(int ch, int len) {
    channels = ch;
    length = len;
    data.assign(static_cast<std::size_t>(ch) * len, 0.0);
  }

  double& at(int c, int t) { return data[static_cast<std::size_t>(t) * channels + c]; }
  double at(int c, int t) const { return data[static_cast<std::size_t>(t) * channels + c]; }
};

inline double glorot_limit(int fan_in, int fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

namespace detail {

// Dot product with eight independent accumulators. The fixed summation
// order breaks the serial dependence chain so the compiler can pack the
// accumulators into vector registers without reassociating anything;
// results are bit-identical across runs of the same binary.
inline double dot(const double* a, const double* b, int n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  double s4 = 0.0, s5 = 0.0, s6 = 0.0, s7 = 0.0;
  int j = 0;
  for (; j + 8 <= n; j += 8) {
    s0 += a[j] * b[j];
    s1 += a[j + 1] * b[j + 1];
    s2 += a[j + 2] * b[j + 2];
    s3 += a[j + 3] * b[j + 3];
    s4 += a[j + 4] * b[j + 4];
    s5 += a[j + 5] * b[j + 5];
    s6 += a[j + 6] * b[j + 6];
    s7 += a[j + 7] * b[j + 7];
  }
  for (; j < n; ++j) s0 += a[j] * b[j];
  return ((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7));
}

inline void axpy(double* y, double a, const double* x, int n) {
  for (int j = 0; j < n; ++j) y[j] += a * x[j];
}

}  // namespace detail

// 1-D convolution, stride 1, no padding. Weights are stored position-major
// per output channel: w[(o * ksize + k) * in_ch + i], which lines up with
// the tensor layout so forward is one contiguous dot product per output.
struct Conv1d {
  int in_ch = 0, out_ch = 0, ksize = 0;
  std::vector<double> w, b;
  std::vector<double> gw, gb;

  Conv1d() = default;
  Conv1d(int in_channels, int out_channels, int kernel, Rng& rng)
      : in_ch(in_channels), out_ch(out_channels), ksize(kernel) {
    const double lim = glorot_limit(in_ch * ksize, out_ch * ksize);
    w.resize(static_cast<std::size_t>(out_ch) * ksize * in_ch);
    for (double& v : w) v = rng.uniform(-lim, lim);
    b.assign(out_ch, 0.0);
    gw.assign(w.size(), 0.0);
    gb.assign(b.size(), 0.0);
  }

  int out_len(int in_len) const { return in_len - ksize + 1; }

  void forward(const Tensor& x, Tensor& y) const {
    if (x.channels != in_ch) throw std::invalid_argument("conv1d: channel mismatch");
    const int lo = out_len(x.length);
    if (lo <= 0) throw std::invalid_argument("conv1d: input shorter than kernel");
    y.resize(out_ch, lo);
    const int kin = ksize * in_ch;
    for (int t = 0; t < lo; ++t) {
      const double* xs = x.data.data() + static_cast<std::size_t>(t) * in_ch;
      double* ys = y.data.data() + static_cast<std::size_t>(t) * out_ch;
      for (int o = 0; o < out_ch; ++o) {
        const double* wr = w.data() + static_cast<std::size_t>(o) * kin;
        ys[o] = b[o] + detail::dot(wr, xs, kin);
      }
    }
  }

  // accumulates gw/gb; writes the input gradient into gx
  void backward(const Tensor& x, const Tensor& gy, Tensor& gx) {
    const int lo = gy.length;
    const int kin = ksize * in_ch;
    gx.resize(in_ch, x.length);
    // weight and bias gradients
    for (int o = 0; o < out_ch; ++o) {
      double* gwr = gw.data() + static_cast<std::size_t>(o) * kin;
      double gbo = 0.0;
      for (int t = 0; t < lo; ++t) {
        const double g = gy.data[static_cast<std::size_t>(t) * out_ch + o];
        gbo += g;
        detail::axpy(gwr, g, x.data.data() + static_cast<std::size_t>(t) * in_ch,
                     kin);
      }
      gb[o] += gbo;
    }
    // input gradient via the transposed weight view wt[j][o] = w[o][j]
    wt_.resize(w.size());
    for (int o = 0; o < out_ch; ++o)
      for (int j = 0; j < kin; ++j)
        wt_[static_cast<std::size_t>(j) * out_ch + o] =
            w[static_cast<std::size_t>(o) * kin + j];
    for (int t = 0; t < lo; ++t) {
      const double* gys = gy.data.data() + static_cast<std::size_t>(t) * out_ch;
      double* gxs = gx.data.data() + static_cast<std::size_t>(t) * in_ch;
      for (int j = 0; j < kin; ++j)
        gxs[j] += detail::dot(wt_.data() + static_cast<std::size_t>(j) * out_ch,
                              gys, out_ch);
    }
  }

  void zero_grad() {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
  }

  void sgd_step(double lr, int batch) {
    const double s = lr / static_cast<double>(batch);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= s * gw[i];
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= s * gb[i];
  }

 private:
  mutable std::vector<double> wt_;
};

// Max pooling, kernel 2, stride 2; an odd trailing element is dropped.
// Ties resolve to the earlier index.
struct MaxPoolCache {
  std::vector<int> argmax;  // flat index into the input tensor
  int in_channels = 0, in_length = 0;
};

inline void maxpool2_forward(const Tensor& x, Tensor& y, MaxPoolCache& cache) {
  const int lo = x.length / 2;
  if (lo == 0) throw std::invalid_argument("maxpool2: input shorter than the window");
  y.resize(x.channels, lo);
  cache.in_channels = x.channels;
  cache.in_length = x.length;
  cache.argmax.resize(static_cast<std::size_t>(x.channels) * lo);
  for (int t = 0; t < lo; ++t) {
    const double* a = x.data.data() + static_cast<std::size_t>(2 * t) * x.channels;
    const double* bp = a + x.channels;
    double* ys = y.data.data() + static_cast<std::size_t>(t) * x.channels;
    int* am = cache.argmax.data() + static_cast<std::size_t>(t) * x.channels;
    for (int c = 0; c < x.channels; ++c) {
      if (a[c] >= bp[c]) {
        ys[c] = a[c];
        am[c] = 2 * t * x.channels + c;
      } else {
        ys[c] = bp[c];
        am[c] = (2 * t + 1) * x.channels + c;
      }
    }
  }
}

inline void maxpool2_backward(const Tensor& gy, const MaxPoolCache& cache, Tensor& gx) {
  gx.resize(cache.in_channels, cache.in_length);
  for (std::size_t i = 0; i < gy.data.size(); ++i)
    gx.data[cache.argmax[i]] += gy.data[i];
}

inline void relu_forward(const Tensor& x, Tensor& y) {
  y.resize(x.channels, x.length);
  for (std::size_t i = 0; i < x.data.size(); ++i)
    y.data[i] = x.data[i] > 0.0 ? x.data[i] : 0.0;
}

// derivative at exactly zero is taken as zero
inline void relu_backward(const Tensor& x_pre, const Tensor& gy, Tensor& gx) {
  gx.resize(x_pre.channels, x_pre.length);
  for (std::size_t i = 0; i < x_pre.data.size(); ++i)
    gx.data[i] = x_pre.data[i] > 0.0 ? gy.data[i] : 0.0;
}

inline double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline void sigmoid_forward(const std::vector<double>& x, std::vector<double>& y) {
  y.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid_scalar(x[i]);
}

// takes the post-activation values
inline void sigmoid_backward(const std::vector<double>& y_post,
                             const std::vector<double>& gy, std::vector<double>& gx) {
  gx.resize(y_post.size());
  for (std::size_t i = 0; i < y_post.size(); ++i)
    gx[i] = gy[i] * y_post[i] * (1.0 - y_post[i]);
}

// numerically stable softmax (max subtracted before exponentiation)
inline std::vector<double> softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw std::invalid_argument("softmax: empty input");
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

// cross-entropy of softmax probabilities against an integer label;
// probability clamped at 1e-12 inside the log. The gradient with respect to
// the logits is p - onehot(label).
inline double softmax_xent(const std::vector<double>& probs, int label,
                           std::vector<double>& grad_logits) {
  if (label < 0 || static_cast<std::size_t>(label) >= probs.size())
    throw std::invalid_argument("softmax_xent: label out of range");
  grad_logits = probs;
  grad_logits[label] -= 1.0;
  return -std::log(std::max(probs[label], 1e-12));
}

// fully connected layer, y = W x + b, W stored row-major (out, in)
struct Dense {
  int in_dim = 0, out_dim = 0;
  std::vector<double> w, b;
  std::vector<double> gw, gb;

  Dense() = default;
  Dense(int in, int out, Rng& rng) : in_dim(in), out_dim(out) {
    const double lim = glorot_limit(in, out);
    w.resize(static_cast<std::size_t>(out) * in);
    for (double& v : w) v = rng.uniform(-lim, lim);
    b.assign(out, 0.0);
    gw.assign(w.size(), 0.0);
    gb.assign(b.size(), 0.0);
  }

  void forward(const std::vector<double>& x, std::vector<double>& y) const {
    if (static_cast<int>(x.size()) != in_dim)
      throw std::invalid_argument("dense: input size mismatch");
    y.resize(out_dim);
    for (int o = 0; o < out_dim; ++o)
      y[o] = b[o] + detail::dot(w.data() + static_cast<std::size_t>(o) * in_dim,
                                x.data(), in_dim);
  }

  void backward(const std::vector<double>& x, const std::vector<double>& gy,
                std::vector<double>& gx) {
    gx.assign(in_dim, 0.0);
    for (int o = 0; o < out_dim; ++o) {
      const double g = gy[o];
      gb[o] += g;
      double* gwr = gw.data() + static_cast<std::size_t>(o) * in_dim;
      const double* wr = w.data() + static_cast<std::size_t>(o) * in_dim;
      for (int i = 0; i < in_dim; ++i) {
        gwr[i] += g * x[i];
        gx[i] += g * wr[i];
      }
    }
  }

  void zero_grad() {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
  }

  void sgd_step(double lr, int batch) {
    const double s = lr / static_cast<double>(batch);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= s * gw[i];
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= s * gb[i];
  }
};

// one plain SGD step on an arbitrary parameter vector
inline void sgd_step(std::vector<double>& params, const std::vector<double>& grads,
                     double lr) {
  if (params.size() != grads.size())
    throw std::invalid_argument("sgd_step: size mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
}

}  // namespace banauth
