// banauth: tabular equilibrium analysis of the four-player game
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0
//
// On a small finite joint distribution q(x, y, z, v) every optimum the
// adversarial game is supposed to reach can be computed exactly: the best
// predictor outputs the label posterior, the best adversaries output their
// own posteriors, and the achievable losses are conditional entropies. This
// header computes those quantities two independent ways (closed-form
// entropy summation vs. brute-force optimization of tabular players) and
// reports whether the identities the training procedure is built on
// actually hold. It also trains the tiny dense model on samples from q so
// the gradient path can be compared against the exact optima.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "banauth/model.hpp"
#include "banauth/rng.hpp"
#include "banauth/train.hpp"

namespace banauth {

// finite joint over (x, y, z, v); y is binary
struct TabularJoint {
  static constexpr int kMaxX = 8;
  static constexpr int kMaxZ = 3;
  static constexpr int kMaxV = 3;

  int n_x = 0, n_z = 0, n_v = 0;
  std::vector<double> p;  // indexed ((x * 2 + y) * n_z + z) * n_v + v

  TabularJoint() = default;
  TabularJoint(int nx, int nz, int nv) : n_x(nx), n_z(nz), n_v(nv) {
    p.assign(static_cast<std::size_t>(nx) * 2 * nz * nv, 0.0);
  }

  double& at(int x, int y, int z, int v) {
    return p[static_cast<std::size_t>(((x * 2 + y) * n_z + z)) * n_v + v];
  }
  double at(int x, int y, int z, int v) const {
    return p[static_cast<std::size_t>(((x * 2 + y) * n_z + z)) * n_v + v];
  }

  void validate() const {
    if (n_x < 1 || n_x > kMaxX || n_z < 1 || n_z > kMaxZ || n_v < 1 ||
        n_v > kMaxV)
      throw std::invalid_argument("tabular joint: unsupported dimensions");
    if (p.size() != static_cast<std::size_t>(n_x) * 2 * n_z * n_v)
      throw std::invalid_argument("tabular joint: table size mismatch");
    double sum = 0.0;
    for (double v : p) {
      if (v < 0.0 || !std::isfinite(v))
        throw std::invalid_argument("tabular joint: negative or non-finite mass");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("tabular joint: mass does not sum to one");
  }

  double px(int x) const {
    double s = 0.0;
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < n_z; ++z)
        for (int v = 0; v < n_v; ++v) s += at(x, y, z, v);
    return s;
  }

  // q(y | x); zero-mass x defaults to certainty on y = 0
  std::array<double, 2> y_posterior(int x) const {
    double m0 = 0.0, m1 = 0.0;
    for (int z = 0; z < n_z; ++z)
      for (int v = 0; v < n_v; ++v) {
        m0 += at(x, 0, z, v);
        m1 += at(x, 1, z, v);
      }
    const double m = m0 + m1;
    if (m <= 0.0) return {1.0, 0.0};
    return {m0 / m, m1 / m};
  }
};

// a representation of x is a partition: two x values with the same group id
// are indistinguishable downstream
using Partition = std::vector<int>;

inline Partition identity_partition(int n_x) {
  Partition part(n_x);
  for (int x = 0; x < n_x; ++x) part[x] = x;
  return part;
}

namespace detail {

// groups x values by arbitrary per-x probability vectors
inline Partition partition_by_vectors(
    const std::vector<std::array<double, 2>>& vecs, double tol) {
  Partition part(vecs.size(), -1);
  std::vector<std::array<double, 2>> reps;
  for (std::size_t x = 0; x < vecs.size(); ++x) {
    for (std::size_t g = 0; g < reps.size(); ++g) {
      if (std::abs(vecs[x][0] - reps[g][0]) < tol &&
          std::abs(vecs[x][1] - reps[g][1]) < tol) {
        part[x] = static_cast<int>(g);
        break;
      }
    }
    if (part[x] < 0) {
      part[x] = static_cast<int>(reps.size());
      reps.push_back(vecs[x]);
    }
  }
  return part;
}

}  // namespace detail

// groups x values whose label posteriors coincide; this is the
// best-representation extractor of the equilibrium analysis
inline Partition posterior_partition(const TabularJoint& q, double tol = 1e-9) {
  std::vector<std::array<double, 2>> posts(q.n_x);
  for (int x = 0; x < q.n_x; ++x) posts[x] = q.y_posterior(x);
  return detail::partition_by_vectors(posts, tol);
}

inline int group_count(const Partition& part) {
  int g = 0;
  for (int v : part) g = std::max(g, v + 1);
  return g;
}

// common refinement: x values land together only when both partitions agree
inline Partition join_partitions(const Partition& a, const Partition& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("join: partition size mismatch");
  Partition out(a.size(), -1);
  std::vector<std::pair<int, int>> seen;
  for (std::size_t x = 0; x < a.size(); ++x) {
    const std::pair<int, int> key{a[x], b[x]};
    for (std::size_t g = 0; g < seen.size(); ++g)
      if (seen[g] == key) {
        out[x] = static_cast<int>(g);
        break;
      }
    if (out[x] < 0) {
      out[x] = static_cast<int>(seen.size());
      seen.push_back(key);
    }
  }
  return out;
}

namespace detail {

inline double xlog(double m) { return m > 0.0 ? m * std::log(m) : 0.0; }

// mass of each (group, label) cell for one of the three label coordinates
enum class LabelCoord { y, z, v };

inline int label_cardinality(const TabularJoint& q, LabelCoord c) {
  switch (c) {
    case LabelCoord::y: return 2;
    case LabelCoord::z: return q.n_z;
    default: return q.n_v;
  }
}

inline std::vector<std::vector<double>> group_label_mass(const TabularJoint& q,
                                                         const Partition& part,
                                                         LabelCoord c) {
  const int groups = group_count(part);
  const int labels = label_cardinality(q, c);
  std::vector<std::vector<double>> m(groups, std::vector<double>(labels, 0.0));
  for (int x = 0; x < q.n_x; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < q.n_z; ++z)
        for (int v = 0; v < q.n_v; ++v) {
          const int lab = (c == LabelCoord::y) ? y
                          : (c == LabelCoord::z) ? z
                                                 : v;
          m[part[x]][lab] += q.at(x, y, z, v);
        }
  return m;
}

}  // namespace detail

// H(label | group) by direct summation over the finite space
inline double conditional_entropy(const TabularJoint& q, const Partition& part,
                                  detail::LabelCoord c) {
  const auto m = detail::group_label_mass(q, part, c);
  double h = 0.0;
  for (const auto& row : m) {
    double pg = 0.0;
    for (double v : row) pg += v;
    if (pg <= 0.0) continue;
    for (double v : row) h -= detail::xlog(v);
    h += detail::xlog(pg);
  }
  return h;
}

inline double entropy_y_given(const TabularJoint& q, const Partition& part) {
  return conditional_entropy(q, part, detail::LabelCoord::y);
}
inline double entropy_z_given(const TabularJoint& q, const Partition& part) {
  return conditional_entropy(q, part, detail::LabelCoord::z);
}
inline double entropy_v_given(const TabularJoint& q, const Partition& part) {
  return conditional_entropy(q, part, detail::LabelCoord::v);
}
inline double entropy_y_given_x(const TabularJoint& q) {
  return entropy_y_given(q, identity_partition(q.n_x));
}

// Partitions x by the label posterior its representation group induces:
// what a downstream player can tell apart when it sees only the predictor
// output computed from the representation.
inline Partition induced_posterior_partition(const TabularJoint& q,
                                             const Partition& part,
                                             double tol = 1e-9) {
  const auto m = detail::group_label_mass(q, part, detail::LabelCoord::y);
  std::vector<std::array<double, 2>> per_x(q.n_x);
  for (int x = 0; x < q.n_x; ++x) {
    const auto& row = m[part[x]];
    const double pg = row[0] + row[1];
    per_x[x] = pg > 0.0 ? std::array<double, 2>{row[0] / pg, row[1] / pg}
                        : std::array<double, 2>{1.0, 0.0};
  }
  return detail::partition_by_vectors(per_x, tol);
}

// result of brute-force optimizing one tabular player against the joint
struct BruteForceResult {
  double loss = 0.0;
  std::vector<std::vector<double>> outputs;  // one distribution per group
  bool no_improvement = true;  // random probing found nothing better
};

// Exhaustively optimizes the binary predictor: per group, a coarse grid
// scan followed by golden-section refinement of the one free probability.
// Never consults the closed-form posterior.
inline BruteForceResult brute_force_predictor(const TabularJoint& q,
                                              const Partition& part) {
  const auto m = detail::group_label_mass(q, part, detail::LabelCoord::y);
  BruteForceResult r;
  r.outputs.resize(m.size());
  const double lo = 1e-12, hi = 1.0 - 1e-12;
  for (std::size_t g = 0; g < m.size(); ++g) {
    const double m0 = m[g][0], m1 = m[g][1];
    auto f = [&](double p1) {
      return -m1 * std::log(std::max(p1, lo)) -
             m0 * std::log(std::max(1.0 - p1, lo));
    };
    // grid scan
    double best = 0.5, fbest = f(0.5);
    for (int i = 0; i <= 2000; ++i) {
      const double p1 = std::min(hi, std::max(lo, i / 2000.0));
      const double fv = f(p1);
      if (fv < fbest) {
        fbest = fv;
        best = p1;
      }
    }
    // golden-section refinement around the grid winner
    double a = std::max(lo, best - 1e-3), b = std::min(hi, best + 1e-3);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 120; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - gr * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + gr * (b - a);
        fd = f(d);
      }
    }
    const double p1 = (a + b) / 2.0;
    r.outputs[g] = {1.0 - p1, p1};
    r.loss += f(p1);
  }
  return r;
}

// Brute-force adversary: exponentiated-gradient descent on the simplex per
// group, then a random-probe certificate that no nearby point does better.
inline BruteForceResult brute_force_adversary(const TabularJoint& q,
                                              const Partition& part,
                                              detail::LabelCoord c,
                                              std::uint64_t probe_seed = 99) {
  if (c == detail::LabelCoord::y)
    throw std::invalid_argument("adversary optimizes z or v, not y");
  const auto m = detail::group_label_mass(q, part, c);
  const int labels = detail::label_cardinality(q, c);
  BruteForceResult r;
  r.outputs.resize(m.size());
  Rng rng(probe_seed);
  for (std::size_t g = 0; g < m.size(); ++g) {
    const auto& w = m[g];
    auto loss_of = [&](const std::vector<double>& d) {
      double s = 0.0;
      for (int k = 0; k < labels; ++k)
        s -= w[k] * std::log(std::max(d[k], 1e-300));
      return s;
    };
    std::vector<double> d(labels, 1.0 / labels);
    for (int it = 0; it < 4000; ++it) {
      // gradient of the loss is -w_k / d_k; exponentiated-gradient step
      double mx = 0.0;
      for (int k = 0; k < labels; ++k) mx = std::max(mx, w[k] / d[k]);
      if (mx <= 0.0) break;  // zero-mass group, anything is optimal
      double norm = 0.0;
      for (int k = 0; k < labels; ++k) {
        d[k] *= std::exp(0.5 * (w[k] / d[k]) / mx);
        norm += d[k];
      }
      for (int k = 0; k < labels; ++k) d[k] /= norm;
    }
    const double base = loss_of(d);
    // certificate: random simplex perturbations never improve
    for (int probe = 0; probe < 200; ++probe) {
      std::vector<double> cand(labels);
      double norm = 0.0;
      const double step = (probe % 2 == 0) ? 1e-3 : 1e-1;
      for (int k = 0; k < labels; ++k) {
        cand[k] = std::max(1e-12, d[k] + step * rng.uniform(-1.0, 1.0));
        norm += cand[k];
      }
      for (int k = 0; k < labels; ++k) cand[k] /= norm;
      if (loss_of(cand) < base - 1e-9) r.no_improvement = false;
    }
    r.outputs[g] = d;
    r.loss += base;
  }
  return r;
}

// One verified identity: two quantities computed by independent routes and
// the tolerance they must meet.
struct EquilibriumCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct EquilibriumReport {
  double h_y_given_x = 0.0;
  std::vector<EquilibriumCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

inline EquilibriumCheck make_check(std::string name, double lhs, double rhs,
                                   double tol) {
  EquilibriumCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.tol = tol;
  c.pass = std::abs(lhs - rhs) <= tol;
  return c;
}

// largest deviation between brute-force outputs (per group) and the exact
// conditional posteriors
inline double max_output_deviation(const TabularJoint& q, const Partition& part,
                                   LabelCoord c,
                                   const BruteForceResult& r) {
  const auto m = group_label_mass(q, part, c);
  double dev = 0.0;
  for (std::size_t g = 0; g < m.size(); ++g) {
    double pg = 0.0;
    for (double v : m[g]) pg += v;
    if (pg <= 0.0) continue;
    for (std::size_t k = 0; k < m[g].size(); ++k)
      dev = std::max(dev, std::abs(r.outputs[g][k] - m[g][k] / pg));
  }
  return dev;
}

}  // namespace detail

// Verifies the identities the adversarial training rests on, each computed
// by two independent routes. The weights alpha = beta = 0.5 only enter the
// combined-criterion check; every identity is weight-free.
inline EquilibriumReport tabular_equilibrium_check(const TabularJoint& q) {
  q.validate();
  constexpr double alpha = 0.5, beta = 0.5;

  EquilibriumReport rep;
  const Partition id = identity_partition(q.n_x);
  const Partition star = posterior_partition(q);
  rep.h_y_given_x = entropy_y_given_x(q);

  // -- optimal players against a fixed (identity) representation --
  const auto bp = brute_force_predictor(q, id);
  const auto bd = brute_force_adversary(q, id, detail::LabelCoord::z);
  const auto bc = brute_force_adversary(q, id, detail::LabelCoord::v);

  rep.checks.push_back(detail::make_check(
      "optimal predictor outputs the label posterior",
      detail::max_output_deviation(q, id, detail::LabelCoord::y, bp), 0.0,
      1e-6));
  rep.checks.push_back(detail::make_check(
      "optimal predictor loss equals H(label | representation)", bp.loss,
      entropy_y_given(q, id), 1e-6));
  rep.checks.push_back(detail::make_check(
      "optimal discriminator loss equals H(motion | representation)", bd.loss,
      entropy_z_given(q, id), 1e-6));
  rep.checks.push_back(detail::make_check(
      "optimal classifier loss equals H(environment | representation)",
      bc.loss, entropy_v_given(q, id), 1e-6));

  // -- combined criterion: brute-force route vs entropy route --
  const double v_brute = bp.loss - alpha * bd.loss - beta * bc.loss;
  const double v_entropy = entropy_y_given(q, id) -
                           alpha * entropy_z_given(q, id) -
                           beta * entropy_v_given(q, id);
  rep.checks.push_back(detail::make_check(
      "combined criterion agrees between optimization and entropy routes",
      v_brute, v_entropy, 1e-6));

  // -- the posterior-grouping extractor --
  rep.checks.push_back(detail::make_check(
      "posterior grouping preserves all label information",
      entropy_y_given(q, star), rep.h_y_given_x, 1e-9));
  // conditioning on (representation, induced predictor output) vs. on the
  // induced predictor output alone
  const Partition induced = induced_posterior_partition(q, star);
  rep.checks.push_back(detail::make_check(
      "motion leaks nothing beyond the label posterior",
      entropy_z_given(q, join_partitions(star, induced)),
      entropy_z_given(q, induced), 1e-9));
  rep.checks.push_back(detail::make_check(
      "environment leaks nothing beyond the label posterior",
      entropy_v_given(q, join_partitions(star, induced)),
      entropy_v_given(q, induced), 1e-9));

  // -- outputs at equilibrium under the posterior-grouping extractor --
  const auto sp = brute_force_predictor(q, star);
  const auto sd = brute_force_adversary(q, star, detail::LabelCoord::z);
  const auto sc = brute_force_adversary(q, star, detail::LabelCoord::v);
  rep.checks.push_back(detail::make_check(
      "equilibrium predictor reproduces the per-sample label posterior",
      detail::max_output_deviation(q, star, detail::LabelCoord::y, sp), 0.0,
      1e-6));
  rep.checks.push_back(detail::make_check(
      "equilibrium discriminator reproduces the grouped motion posterior",
      detail::max_output_deviation(q, star, detail::LabelCoord::z, sd), 0.0,
      1e-6));
  rep.checks.push_back(detail::make_check(
      "equilibrium classifier reproduces the grouped environment posterior",
      detail::max_output_deviation(q, star, detail::LabelCoord::v, sc), 0.0,
      1e-6));
  return rep;
}

// ---- built-in joints ----

// Four equally likely x values with label posteriors (0.9, 0.9, 0.1, 0.1);
// z and v depend on x but are conditionally independent of y given x.
// H(y | x) = 0.325083 nats.
inline TabularJoint joint_two_level_posterior() {
  TabularJoint q(4, 3, 3);
  const double py1[4] = {0.9, 0.9, 0.1, 0.1};
  const double pz[4][3] = {{0.7, 0.2, 0.1},
                           {0.1, 0.7, 0.2},
                           {0.2, 0.1, 0.7},
                           {0.4, 0.4, 0.2}};
  const double pv[4][3] = {{0.5, 0.3, 0.2},
                           {0.2, 0.5, 0.3},
                           {0.3, 0.2, 0.5},
                           {0.1, 0.6, 0.3}};
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 3; ++z)
        for (int v = 0; v < 3; ++v)
          q.at(x, y, z, v) =
              0.25 * (y == 1 ? py1[x] : 1.0 - py1[x]) * pz[x][z] * pv[x][v];
  return q;
}

// y is a deterministic function of x, so H(y | x) = 0
inline TabularJoint joint_deterministic_y() {
  TabularJoint q(4, 2, 2);
  const double pz[4][2] = {{0.6, 0.4}, {0.3, 0.7}, {0.5, 0.5}, {0.8, 0.2}};
  for (int x = 0; x < 4; ++x) {
    const int y = (x < 2) ? 1 : 0;
    for (int z = 0; z < 2; ++z)
      for (int v = 0; v < 2; ++v)
        q.at(x, y, z, v) = 0.25 * pz[x][z] * (v == 0 ? 0.45 : 0.55);
  }
  return q;
}

// y is independent of everything, with marginal (0.7, 0.3); any
// representation leaves the predictor loss at H(y)
inline TabularJoint joint_independent_y() {
  TabularJoint q(4, 2, 2);
  const double pz[4][2] = {{0.9, 0.1}, {0.2, 0.8}, {0.6, 0.4}, {0.3, 0.7}};
  const double pv[4][2] = {{0.5, 0.5}, {0.7, 0.3}, {0.1, 0.9}, {0.4, 0.6}};
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        for (int v = 0; v < 2; ++v)
          q.at(x, y, z, v) =
              0.25 * (y == 1 ? 0.3 : 0.7) * pz[x][z] * pv[x][v];
  return q;
}

// ---- gradient training against the exact optima ----

struct OracleComparison {
  double h_y_given_x = 0.0;   // exact target for the predictor loss
  double h_z_grouped = 0.0;   // H(motion | label posterior)
  double h_v_grouped = 0.0;   // H(environment | label posterior)
  double l_pred = 0.0;        // trained model, empirical on the sample
  double l_disc = 0.0;
  double l_clas = 0.0;
  TrainHistory history;
};

// draws one sample (x, y, z, v) from q by inverse CDF
inline std::array<int, 4> sample_joint(const TabularJoint& q, Rng& rng) {
  double u = rng.uniform();
  for (int x = 0; x < q.n_x; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < q.n_z; ++z)
        for (int v = 0; v < q.n_v; ++v) {
          u -= q.at(x, y, z, v);
          if (u <= 0.0) return {x, y, z, v};
        }
  return {q.n_x - 1, 1, q.n_z - 1, q.n_v - 1};
}

inline TrainSet sample_train_set(const TabularJoint& q, int n,
                                 std::uint64_t seed) {
  Rng rng(seed);
  TrainSet s;
  s.x.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto draw = sample_joint(q, rng);
    std::vector<double> onehot(q.n_x, 0.0);
    onehot[draw[0]] = 1.0;
    s.x.push_back(std::move(onehot));
    s.y.push_back(draw[1]);
    s.z.push_back(draw[2]);
    s.v.push_back(draw[3]);
  }
  return s;
}

// Trains the tiny dense model with the alternating procedure on samples
// from q and reports its empirical losses next to the exact optima.
inline OracleComparison train_tabular_vs_oracle(const TabularJoint& q,
                                                const TrainConfig& cfg,
                                                int n_samples,
                                                std::uint64_t data_seed,
                                                int embedding_dim = 4) {
  q.validate();
  OracleComparison out;
  out.h_y_given_x = entropy_y_given_x(q);
  const Partition star = posterior_partition(q);
  out.h_z_grouped = entropy_z_given(q, star);
  out.h_v_grouped = entropy_v_given(q, star);

  const TrainSet data = sample_train_set(q, n_samples, data_seed);
  Rng rng(cfg.seed + 7717);
  DenseExtractor ext(q.n_x, embedding_dim, rng);
  TabularModel m(std::move(ext), 0, q.n_z, q.n_v, rng);
  out.history = train(m, data, cfg);

  // empirical losses of the trained model over the drawn sample
  double lp = 0.0, ld = 0.0, lc = 0.0;
  DenseExtractorCache ec;
  HeadCache hc;
  std::vector<double> tmp;
  for (std::size_t i = 0; i < data.size(); ++i) {
    m.extractor.forward(data.x[i], ec);
    const auto u = softmax(m.pred.forward(ec.embedding, hc));
    lp += softmax_xent(u, data.y[i], tmp);
    std::vector<double> o(ec.embedding);
    o.insert(o.end(), u.begin(), u.end());
    ld += softmax_xent(softmax(m.disc.forward(o, hc)), data.z[i], tmp);
    lc += softmax_xent(softmax(m.clas.forward(o, hc)), data.v[i], tmp);
  }
  out.l_pred = lp / data.size();
  out.l_disc = ld / data.size();
  out.l_clas = lc / data.size();
  return out;
}

}  // namespace banauth
