// banauth: adversarial training loop for the four-player model
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0
//
// Alternating minimization. Each outer iteration draws one batch and runs:
//   1. predictor step: theta_P descends the on/off cross-entropy L_P;
//   2. inner loop, repeated inner_iters times:
//      a. adversary step: D and C each descend their own cross-entropy,
//         reading the embedding joined with the predictor's probabilities;
//      b. extractor step: theta_E descends V = L_P - alpha L_D - beta L_C,
//         with the adversary losses recomputed under the freshly updated
//         heads.
// The predictor probabilities entering D and C are treated as constants:
// no gradient flows through them into theta_P or theta_E. Setting
// alpha = beta = 0 gives the plain baseline; D and C still train, so their
// losses remain comparable, but they no longer influence the extractor.
//
// Identical data, config, and seed give bit-identical parameter
// trajectories; every loop runs in a fixed order.

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "banauth/model.hpp"
#include "banauth/nnet.hpp"
#include "banauth/rng.hpp"

namespace banauth {

struct TrainConfig {
  double alpha = 0.5;
  double beta = 0.5;
  double lr_pred = 0.001;
  double lr_disc = 0.001;
  double lr_clas = 0.001;
  double lr_extractor = 0.001;
  int batch = 128;
  int outer_iters = 2000;
  int inner_iters = 2;
  std::uint64_t seed = 1;
};

// batch-mean losses recorded once per outer iteration, measured during the
// final extractor step
struct TrainStats {
  double l_pred = 0.0;
  double l_disc = 0.0;
  double l_clas = 0.0;
  double value = 0.0;  // l_pred - alpha * l_disc - beta * l_clas
};

using TrainHistory = std::vector<TrainStats>;

struct TrainSet {
  std::vector<std::vector<double>> x;
  std::vector<int> y, z, v;

  std::size_t size() const { return x.size(); }

  void validate(int input_dim, int n_z, int n_v) const {
    if (x.empty()) throw std::invalid_argument("train set: empty");
    if (y.size() != x.size() || z.size() != x.size() || v.size() != x.size())
      throw std::invalid_argument("train set: label count mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (static_cast<int>(x[i].size()) != input_dim)
        throw std::invalid_argument("train set: feature size mismatch");
      if (y[i] < 0 || y[i] > 1) throw std::invalid_argument("train set: bad y");
      if (z[i] < 0 || z[i] >= n_z) throw std::invalid_argument("train set: bad z");
      if (v[i] < 0 || v[i] >= n_v) throw std::invalid_argument("train set: bad v");
    }
  }
};

// The loop is split into named phases so tests can drive them one at a time
// and inspect gradients between phases.
template <class ExtractorT>
class Trainer {
 public:
  using Model = FourPlayerModel<ExtractorT>;

  Trainer(Model& model, const TrainSet& data, const TrainConfig& cfg)
      : m_(model), data_(data), cfg_(cfg), rng_(cfg.seed) {
    if (cfg.batch < 1 || cfg.outer_iters < 0 || cfg.inner_iters < 1)
      throw std::invalid_argument("train config: bad loop sizes");
    if (cfg.alpha < 0.0 || cfg.beta < 0.0)
      throw std::invalid_argument("train config: negative adversary weight");
    data.validate(m_.extractor.input_dim(), m_.n_z, m_.n_v);
    if (static_cast<std::size_t>(cfg.batch) > data.size())
      throw std::invalid_argument("train config: batch exceeds dataset");
    const std::size_t b = static_cast<std::size_t>(cfg.batch);
    idx_.resize(b);
    ec_.resize(b);
    pc_.resize(b);
    dc_.resize(b);
    cc_.resize(b);
    u_.resize(b);
    o_.resize(b);
  }

  TrainHistory run() {
    TrainHistory history;
    history.reserve(cfg_.outer_iters);
    for (int it = 0; it < cfg_.outer_iters; ++it) {
      sample_batch();
      forward_batch();
      predictor_step();
      refresh_predictions();
      TrainStats stats;
      for (int inner = 0; inner < cfg_.inner_iters; ++inner) {
        if (inner > 0) {
          forward_batch();  // the extractor moved; refresh everything
        }
        adversary_step();
        stats = extractor_step();
      }
      history.push_back(stats);
    }
    return history;
  }

  // draws batch indices uniformly with replacement
  void sample_batch() {
    for (auto& i : idx_) i = rng_.uniform_int(data_.size());
  }

  // runs the extractor on the batch, then the predictor
  void forward_batch() {
    for (std::size_t j = 0; j < idx_.size(); ++j)
      m_.extractor.forward(data_.x[idx_[j]], ec_[j]);
    refresh_predictions();
  }

  // recomputes predictor outputs and adversary inputs on cached embeddings
  void refresh_predictions() {
    for (std::size_t j = 0; j < idx_.size(); ++j) {
      u_[j] = softmax(m_.pred.forward(ec_[j].embedding, pc_[j]));
      auto& o = o_[j];
      o.resize(ec_[j].embedding.size() + u_[j].size());
      std::size_t p = 0;
      for (double e : ec_[j].embedding) o[p++] = e;
      for (double uu : u_[j]) o[p++] = uu;
    }
  }

  // one SGD step on theta_P against L_P; returns the batch-mean L_P
  double predictor_step() {
    m_.pred.zero_grad();
    double lp = 0.0;
    for (std::size_t j = 0; j < idx_.size(); ++j) {
      lp += softmax_xent(u_[j], data_.y[idx_[j]], g_logits_);
      m_.pred.backward(pc_[j], g_logits_, gx_);
    }
    m_.pred.sgd_step(cfg_.lr_pred, cfg_.batch);
    return lp / cfg_.batch;
  }

  // batch-mean adversary losses on the cached inputs, no parameter updates
  std::pair<double, double> adversary_losses() {
    double ld = 0.0, lc = 0.0;
    for (std::size_t j = 0; j < idx_.size(); ++j) {
      ld += softmax_xent(softmax(m_.disc.forward(o_[j], dc_[j])),
                         data_.z[idx_[j]], g_logits_);
      lc += softmax_xent(softmax(m_.clas.forward(o_[j], cc_[j])),
                         data_.v[idx_[j]], g_logits_);
    }
    return {ld / cfg_.batch, lc / cfg_.batch};
  }

  // one SGD step each on theta_D and theta_C; the predictor probabilities in
  // the input are constants here, so nothing propagates to theta_P
  std::pair<double, double> adversary_step() {
    m_.disc.zero_grad();
    m_.clas.zero_grad();
    double ld = 0.0, lc = 0.0;
    for (std::size_t j = 0; j < idx_.size(); ++j) {
      ld += softmax_xent(softmax(m_.disc.forward(o_[j], dc_[j])),
                         data_.z[idx_[j]], g_logits_);
      m_.disc.backward(dc_[j], g_logits_, gx_);
      lc += softmax_xent(softmax(m_.clas.forward(o_[j], cc_[j])),
                         data_.v[idx_[j]], g_logits_);
      m_.clas.backward(cc_[j], g_logits_, gx_);
    }
    m_.disc.sgd_step(cfg_.lr_disc, cfg_.batch);
    m_.clas.sgd_step(cfg_.lr_clas, cfg_.batch);
    return {ld / cfg_.batch, lc / cfg_.batch};
  }

  // one SGD step on theta_E against V, with D and C evaluated at their
  // current (just updated) parameters; returns the recorded losses
  TrainStats extractor_step() {
    const int emb = m_.extractor.embedding_dim();
    m_.extractor.zero_grad();
    double lp = 0.0, ld = 0.0, lc = 0.0;
    for (std::size_t j = 0; j < idx_.size(); ++j) {
      // predictor path of V: parameters unchanged since the last refresh,
      // so the cached logits and probabilities are still valid
      lp += softmax_xent(u_[j], data_.y[idx_[j]], g_logits_);
      m_.pred.backward(pc_[j], g_logits_, ge_p_);

      ld += softmax_xent(softmax(m_.disc.forward(o_[j], dc_[j])),
                         data_.z[idx_[j]], g_logits_);
      m_.disc.backward(dc_[j], g_logits_, go_d_);
      lc += softmax_xent(softmax(m_.clas.forward(o_[j], cc_[j])),
                         data_.v[idx_[j]], g_logits_);
      m_.clas.backward(cc_[j], g_logits_, go_c_);

      // dV/d(embedding); the adversary gradients flowing into the predictor
      // probability slots are dropped, which is the stop-gradient
      ge_.resize(emb);
      for (int i = 0; i < emb; ++i)
        ge_[i] = ge_p_[i] - cfg_.alpha * go_d_[i] - cfg_.beta * go_c_[i];
      m_.extractor.backward(ec_[j], ge_);
    }
    m_.extractor.sgd_step(cfg_.lr_extractor, cfg_.batch);

    TrainStats s;
    s.l_pred = lp / cfg_.batch;
    s.l_disc = ld / cfg_.batch;
    s.l_clas = lc / cfg_.batch;
    s.value = s.l_pred - cfg_.alpha * s.l_disc - cfg_.beta * s.l_clas;
    return s;
  }

  Model& model() { return m_; }
  const std::vector<std::size_t>& batch_indices() const { return idx_; }

 private:
  Model& m_;
  const TrainSet& data_;
  TrainConfig cfg_;
  Rng rng_;

  std::vector<std::size_t> idx_;
  std::vector<typename ExtractorT::Cache> ec_;
  std::vector<HeadCache> pc_, dc_, cc_;
  std::vector<std::vector<double>> u_, o_;
  std::vector<double> g_logits_, gx_, ge_p_, go_d_, go_c_, ge_;
};

template <class ExtractorT>
TrainHistory train(FourPlayerModel<ExtractorT>& model, const TrainSet& data,
                   const TrainConfig& cfg) {
  Trainer<ExtractorT> t(model, data, cfg);
  return t.run();
}

// Converged adversary losses for a trained model. The extractor and
// predictor stay fixed, so the adversary inputs are constants; D and C
// continue from their trained parameters for `iters` further SGD steps and
// the final losses are measured over the whole set. The result depends only
// on the model, data, and seed, with none of the minibatch noise that sits
// on the tail of a training history.
template <class ExtractorT>
std::pair<double, double> converged_adversary_losses(
    const FourPlayerModel<ExtractorT>& model, const TrainSet& data, int iters,
    int batch, double lr_disc, double lr_clas, std::uint64_t seed) {
  if (iters < 0 || batch < 1)
    throw std::invalid_argument("adversary refit: bad loop sizes");
  data.validate(model.extractor.input_dim(), model.n_z, model.n_v);

  typename ExtractorT::Cache ec;
  HeadCache pc;
  std::vector<std::vector<double>> o(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    model.extractor.forward(data.x[i], ec);
    const auto u = softmax(model.pred.forward(ec.embedding, pc));
    o[i] = ec.embedding;
    o[i].insert(o[i].end(), u.begin(), u.end());
  }

  Head disc = model.disc;
  Head clas = model.clas;
  Rng rng(seed);
  HeadCache dc, cc;
  std::vector<double> g_logits, gx;
  for (int it = 0; it < iters; ++it) {
    disc.zero_grad();
    clas.zero_grad();
    for (int b = 0; b < batch; ++b) {
      const std::size_t i = rng.uniform_int(data.size());
      softmax_xent(softmax(disc.forward(o[i], dc)), data.z[i], g_logits);
      disc.backward(dc, g_logits, gx);
      softmax_xent(softmax(clas.forward(o[i], cc)), data.v[i], g_logits);
      clas.backward(cc, g_logits, gx);
    }
    disc.sgd_step(lr_disc, batch);
    clas.sgd_step(lr_clas, batch);
  }

  double ld = 0.0, lc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    ld += softmax_xent(softmax(disc.forward(o[i], dc)), data.z[i], g_logits);
    lc += softmax_xent(softmax(clas.forward(o[i], cc)), data.v[i], g_logits);
  }
  return {ld / static_cast<double>(data.size()),
          lc / static_cast<double>(data.size())};
}

}  // namespace banauth
