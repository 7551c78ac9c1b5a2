// Command-line front end: wires the simulator, featurizer, trainer,
// evaluator, protocol runner, and the tabular equilibrium checker into
// reproducible subcommands. Every output is a pure function of
// (config, seed, inputs).
//
// Copyright 2026 The banauth Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "banauth/equilibrium.hpp"
#include "banauth/pipeline.hpp"
#include "banauth/protocol.hpp"

namespace fs = std::filesystem;
using namespace banauth;

namespace {

TabularJoint joint_from_json(const nlohmann::json& j) {
  TabularJoint q(j.at("n_x").get<int>(), j.at("n_z").get<int>(),
                 j.at("n_v").get<int>());
  const auto p = j.at("p").get<std::vector<double>>();
  if (p.size() != q.p.size())
    throw std::invalid_argument("joint: p has wrong length");
  q.p = p;
  q.validate();
  return q;
}

int print_report(const std::string& label, const EquilibriumReport& rep) {
  std::printf("## %s\n", label.c_str());
  for (const auto& c : rep.checks) {
    std::printf("[%s] %-58s lhs=%.9f rhs=%.9f tol=%g\n",
                c.pass ? "pass" : "FAIL", c.name.c_str(), c.lhs, c.rhs, c.tol);
  }
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"on-body device authentication: simulation, training, and "
               "protocol experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  app.add_option("--config", config_path, "experiment config JSON");
  auto* seed_opt =
      app.add_option("--seed", seed_override, "override the config seed");
  app.add_option("--out", out_override, "override the output directory");

  auto* cmd_sim = app.add_subcommand("simulate", "generate the trace dataset");
  auto* cmd_feat = app.add_subcommand(
      "featurize", "build profiles and the train/test split from traces");
  auto* cmd_train =
      app.add_subcommand("train", "train the four-player model on profiles");
  bool baseline = false;
  cmd_train->add_flag("--baseline", baseline,
                      "train without adversaries (both weights zero)");
  auto* cmd_eval = app.add_subcommand(
      "evaluate", "score the test split and emit metrics, ROC, and plots");

  auto* cmd_proto =
      app.add_subcommand("protocol", "replay a scripted gateway scenario");
  std::string scenario_path;
  std::string verifier_name = "oracle";
  cmd_proto->add_option("--scenario", scenario_path, "scenario script JSON")
      ->required();
  cmd_proto->add_option("--verifier", verifier_name,
                        "oracle, threshold, or learned");

  auto* cmd_theory = app.add_subcommand(
      "theory-check", "verify equilibrium identities on tabular joints");
  std::string joint_path;
  cmd_theory->add_option("--joint", joint_path,
                         "joint distribution JSON (default: built-ins)");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (seed_opt->count() > 0) cfg.seed = seed_override;
    if (!out_override.empty()) cfg.out_dir = out_override;

    if (cmd_sim->parsed()) {
      const SimulateResult res = run_simulate(cfg);
      std::printf("wrote %zu traces to %s\n", res.entries.size(),
                  cfg.out_dir.c_str());
      for (const auto& [cell, count] : res.cell_counts) {
        const auto [y, z, v] = cell;
        std::printf("  %s %-12s %-10s : %d\n", y ? "on " : "off",
                    motion_name(static_cast<MotionClass>(z)),
                    environment_name(static_cast<Environment>(v)), count);
      }
      return 0;
    }

    if (cmd_feat->parsed()) {
      const FeaturizeResult res = run_featurize(cfg);
      std::printf("profiles: %zu train, %zu test\n", res.train_profiles,
                  res.test_profiles);
      return 0;
    }

    if (cmd_train->parsed()) {
      const TrainResult res = run_train(cfg, baseline);
      if (res.history.empty()) {
        std::printf("trained 0 iterations\n");
      } else {
        const TrainStats& last = res.history.back();
        std::printf(
            "trained %zu iterations on %zu profiles%s\n"
            "final: l_pred=%.4f l_disc=%.4f l_clas=%.4f value=%.4f\n",
            res.history.size(), res.samples, baseline ? " (baseline)" : "",
            last.l_pred, last.l_disc, last.l_clas, last.value);
      }
      return 0;
    }

    if (cmd_eval->parsed()) {
      const EvaluateResult res = run_evaluate(cfg);
      std::printf("test profiles: %zu\naccuracy: %.4f\n", res.metrics.count,
                  res.metrics.accuracy);
      if (res.metrics.tp_rate)
        std::printf("tp_rate: %.4f\n", *res.metrics.tp_rate);
      if (res.metrics.fp_rate)
        std::printf("fp_rate: %.4f\n", *res.metrics.fp_rate);
      std::printf("auroc: %.4f\n", res.auroc);
      for (const auto& [z, g] : res.metrics.by_motion) {
        std::printf("  motion %-12s acc=%.4f",
                    motion_name(static_cast<MotionClass>(z)), g.accuracy);
        if (g.tp_rate) std::printf(" tp=%.4f", *g.tp_rate);
        if (g.fp_rate) std::printf(" fp=%.4f", *g.fp_rate);
        std::printf("\n");
      }
      for (const auto& [v, g] : res.metrics.by_environment) {
        std::printf("  env    %-12s acc=%.4f",
                    environment_name(static_cast<Environment>(v)), g.accuracy);
        if (g.tp_rate) std::printf(" tp=%.4f", *g.tp_rate);
        if (g.fp_rate) std::printf(" fp=%.4f", *g.fp_rate);
        std::printf("\n");
      }
      return 0;
    }

    if (cmd_proto->parsed()) {
      const Scenario sc = scenario_from_json(detail::load_json(scenario_path));

      std::unique_ptr<Verifier> verifier;
      ConvModel* model_keepalive = nullptr;
      std::unique_ptr<ConvModel> model;
      std::unique_ptr<Normalizer> norm;
      if (verifier_name == "oracle") {
        verifier = std::make_unique<OracleVerifier>();
      } else if (verifier_name == "threshold") {
        verifier = std::make_unique<ThresholdVerifier>();
      } else if (verifier_name == "learned") {
        model = std::make_unique<ConvModel>(read_checkpoint(
            (fs::path(cfg.out_dir) / "checkpoint.json").string()));
        norm = std::make_unique<Normalizer>(read_normalizer(
            (fs::path(cfg.out_dir) / "normalizer.json").string()));
        verifier = std::make_unique<LearnedVerifier>(*norm, *model);
        model_keepalive = model.get();
      } else {
        throw std::invalid_argument("unknown verifier: " + verifier_name);
      }
      (void)model_keepalive;

      const Transcript tr =
          run_scenario(sc, *verifier, sub_seed(cfg.seed, kTrainSeedIndex + 1));
      fs::create_directories(cfg.out_dir);
      {
        auto os =
            detail::open_out((fs::path(cfg.out_dir) / "transcript.jsonl").string());
        write_transcript(os, tr);
      }
      int denies = 0, accepts = 0;
      for (const auto& t : tr)
        for (const auto& e : t.emitted) {
          denies += e.kind == MsgKind::assoc_deny;
          accepts += e.kind == MsgKind::assoc_accept;
        }
      std::printf("transitions: %zu, final phase: %s, accepts: %d, denies: %d\n",
                  tr.size(),
                  tr.empty() ? "idle" : phase_name(tr.back().after), accepts,
                  denies);
      return 0;
    }

    if (cmd_theory->parsed()) {
      int rc = 0;
      if (!joint_path.empty()) {
        const TabularJoint q = joint_from_json(detail::load_json(joint_path));
        rc |= print_report(joint_path, tabular_equilibrium_check(q));
      } else {
        rc |= print_report("two-level posterior joint",
                           tabular_equilibrium_check(joint_two_level_posterior()));
        rc |= print_report("deterministic label joint",
                           tabular_equilibrium_check(joint_deterministic_y()));
        rc |= print_report("label-independent joint",
                           tabular_equilibrium_check(joint_independent_y()));
      }
      std::printf(rc == 0 ? "all checks passed\n" : "CHECKS FAILED\n");
      return rc;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
