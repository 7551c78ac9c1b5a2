// banauth: extractor and head networks for the four-player training setup
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0
//
// One shared feature extractor feeds three small heads: the on/off-body
// predictor, a motion discriminator, and an environment classifier. The
// adversary heads read the embedding concatenated with the predictor's
// output probabilities. Caches hold whatever the backward passes need, so
// a forward/backward pair never re-runs the network.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "banauth/nnet.hpp"
#include "banauth/rng.hpp"

namespace banauth {

// Convolutional extractor: eight conv layers (kernel 3, stride 1, no
// padding), ReLU after each, max-pool of 2 after the first five. The final
// feature map is flattened channel-interleaved.
struct ConvExtractorCache {
  std::vector<Tensor> in;    // input tensor of each conv layer
  std::vector<Tensor> pre;   // conv output before the ReLU
  std::vector<MaxPoolCache> pool;
  Tensor post;               // scratch
  Tensor g_post, g_pre, g_in;  // backward scratch
  std::vector<double> embedding;
};

class ConvExtractor {
 public:
  static constexpr int kLayers = 8;
  static constexpr int kPooled = 5;  // layers 0..4 are followed by a pool

  using Cache = ConvExtractorCache;

  ConvExtractor(int input_dim, int channels, Rng& rng)
      : input_dim_(input_dim), channels_(channels) {
    if (input_dim < 2 || channels < 1)
      throw std::invalid_argument("conv extractor: bad dimensions");
    layers_.reserve(kLayers);
    lens_.resize(kLayers + 1);
    int len = input_dim;
    for (int l = 0; l < kLayers; ++l) {
      lens_[l] = len;
      const int in_ch = (l == 0) ? 1 : channels;
      layers_.emplace_back(in_ch, channels, 3, rng);
      len -= 2;  // conv, kernel 3
      if (l < kPooled) len /= 2;
      if (len < (l + 1 < kLayers ? 3 : 1))
        throw std::invalid_argument("conv extractor: input too short for depth");
    }
    lens_[kLayers] = len;
    embedding_dim_ = len * channels;
  }

  int input_dim() const { return input_dim_; }
  int channels() const { return channels_; }
  int embedding_dim() const { return embedding_dim_; }
  // layer input lengths followed by the final map length
  const std::vector<int>& length_trace() const { return lens_; }
  std::vector<Conv1d>& layers() { return layers_; }
  const std::vector<Conv1d>& layers() const { return layers_; }

  void forward(const std::vector<double>& x, Cache& c) const {
    if (static_cast<int>(x.size()) != input_dim_)
      throw std::invalid_argument("conv extractor: input size mismatch");
    c.in.resize(kLayers);
    c.pre.resize(kLayers);
    c.pool.resize(kPooled);
    c.in[0].resize(1, input_dim_);
    c.in[0].data.assign(x.begin(), x.end());
    for (int l = 0; l < kLayers; ++l) {
      layers_[l].forward(c.in[l], c.pre[l]);
      if (l + 1 < kLayers) {
        if (l < kPooled) {
          relu_forward(c.pre[l], c.post);
          maxpool2_forward(c.post, c.in[l + 1], c.pool[l]);
        } else {
          relu_forward(c.pre[l], c.in[l + 1]);
        }
      } else {
        relu_forward(c.pre[l], c.post);
        c.embedding.assign(c.post.data.begin(), c.post.data.end());
      }
    }
  }

  // accumulates parameter gradients for the whole stack
  void backward(Cache& c, const std::vector<double>& g_embedding) {
    if (static_cast<int>(g_embedding.size()) != embedding_dim_)
      throw std::invalid_argument("conv extractor: gradient size mismatch");
    c.g_post.resize(channels_, lens_[kLayers]);
    c.g_post.data.assign(g_embedding.begin(), g_embedding.end());
    for (int l = kLayers - 1; l >= 0; --l) {
      relu_backward(c.pre[l], c.g_post, c.g_pre);
      layers_[l].backward(c.in[l], c.g_pre, c.g_in);
      if (l > 0) {
        if (l - 1 < kPooled)
          maxpool2_backward(c.g_in, c.pool[l - 1], c.g_post);
        else
          c.g_post = c.g_in;
      }
    }
  }

  void zero_grad() {
    for (auto& l : layers_) l.zero_grad();
  }
  void sgd_step(double lr, int batch) {
    for (auto& l : layers_) l.sgd_step(lr, batch);
  }

 private:
  int input_dim_ = 0, channels_ = 0, embedding_dim_ = 0;
  std::vector<int> lens_;
  std::vector<Conv1d> layers_;
};

// Single linear layer; used for small tabular problems where the input is
// already a one-hot code.
struct DenseExtractorCache {
  std::vector<double> x;
  std::vector<double> embedding;
};

class DenseExtractor {
 public:
  using Cache = DenseExtractorCache;

  DenseExtractor(int input_dim, int embedding_dim, Rng& rng)
      : lin_(input_dim, embedding_dim, rng) {}

  int input_dim() const { return lin_.in_dim; }
  int embedding_dim() const { return lin_.out_dim; }
  Dense& linear() { return lin_; }
  const Dense& linear() const { return lin_; }

  void forward(const std::vector<double>& x, Cache& c) const {
    c.x = x;
    lin_.forward(x, c.embedding);
  }

  void backward(Cache& c, const std::vector<double>& g_embedding) {
    lin_.backward(c.x, g_embedding, gx_);
  }

  void zero_grad() { lin_.zero_grad(); }
  void sgd_step(double lr, int batch) { lin_.sgd_step(lr, batch); }

 private:
  Dense lin_;
  std::vector<double> gx_;
};

// Classification head: dense + sigmoid + dense when hidden_dim > 0, a single
// dense layer otherwise. Softmax stays outside so losses can fuse with it.
struct HeadCache {
  std::vector<double> x, h_pre, h_post, logits;
  std::vector<double> g_h_post, g_h_pre;  // backward scratch
};

class Head {
 public:
  Head() = default;
  Head(int in_dim, int hidden_dim, int out_dim, Rng& rng) {
    if (hidden_dim > 0) {
      hidden_ = true;
      d1 = Dense(in_dim, hidden_dim, rng);
      d2 = Dense(hidden_dim, out_dim, rng);
    } else {
      hidden_ = false;
      d1 = Dense(in_dim, out_dim, rng);
    }
  }

  bool has_hidden() const { return hidden_; }
  int in_dim() const { return d1.in_dim; }
  int out_dim() const { return hidden_ ? d2.out_dim : d1.out_dim; }

  const std::vector<double>& forward(const std::vector<double>& x,
                                     HeadCache& c) const {
    c.x = x;
    if (hidden_) {
      d1.forward(x, c.h_pre);
      sigmoid_forward(c.h_pre, c.h_post);
      d2.forward(c.h_post, c.logits);
    } else {
      d1.forward(x, c.logits);
    }
    return c.logits;
  }

  // accumulates parameter gradients; writes the input gradient to gx
  void backward(HeadCache& c, const std::vector<double>& g_logits,
                std::vector<double>& gx) {
    if (hidden_) {
      d2.backward(c.h_post, g_logits, c.g_h_post);
      sigmoid_backward(c.h_post, c.g_h_post, c.g_h_pre);
      d1.backward(c.x, c.g_h_pre, gx);
    } else {
      d1.backward(c.x, g_logits, gx);
    }
  }

  void zero_grad() {
    d1.zero_grad();
    if (hidden_) d2.zero_grad();
  }
  void sgd_step(double lr, int batch) {
    d1.sgd_step(lr, batch);
    if (hidden_) d2.sgd_step(lr, batch);
  }

  Dense d1, d2;

 private:
  bool hidden_ = false;
};

// The four players: extractor E, predictor P (on/off body), discriminator D
// (motion class), classifier C (environment). D and C read the embedding
// concatenated with P's two output probabilities.
template <class ExtractorT>
struct FourPlayerModel {
  using Extractor = ExtractorT;

  Extractor extractor;
  Head pred, disc, clas;
  int n_z = 0, n_v = 0;

  FourPlayerModel(Extractor ext, int head_hidden, int num_z, int num_v, Rng& rng)
      : extractor(std::move(ext)),
        pred(extractor.embedding_dim(), head_hidden, 2, rng),
        disc(extractor.embedding_dim() + 2, head_hidden, num_z, rng),
        clas(extractor.embedding_dim() + 2, head_hidden, num_v, rng),
        n_z(num_z),
        n_v(num_v) {
    if (num_z < 2 || num_v < 2)
      throw std::invalid_argument("four-player model: need at least two classes");
  }

  // probability that the sample is on-body
  double score_on(const std::vector<double>& x) const {
    typename Extractor::Cache ec;
    HeadCache hc;
    extractor.forward(x, ec);
    const auto probs = softmax(pred.forward(ec.embedding, hc));
    return probs[1];
  }

  // hard label at the 0.5 boundary; a tie goes to off-body
  int predict(const std::vector<double>& x) const {
    return score_on(x) > 0.5 ? 1 : 0;
  }
};

using ConvModel = FourPlayerModel<ConvExtractor>;
using TabularModel = FourPlayerModel<DenseExtractor>;

// the deployed architecture: 380-sample profiles, 128 channels, 384-wide
// embedding, 64-unit heads
inline ConvModel make_profile_model(Rng& rng, int channels = 128,
                                    int head_hidden = 64, int n_z = 5,
                                    int n_v = 5) {
  ConvExtractor ext(380, channels, rng);
  return ConvModel(std::move(ext), head_hidden, n_z, n_v, rng);
}

}  // namespace banauth
