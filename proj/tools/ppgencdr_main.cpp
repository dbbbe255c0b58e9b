// Copyright 2026 The PPGenCDR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ppgencdr/config.hpp"
#include "ppgencdr/dirac.hpp"
#include "ppgencdr/errors.hpp"
#include "ppgencdr/pipeline.hpp"
#include "ppgencdr/snapshot.hpp"

namespace {

using ppgencdr::config::FlatToml;
using ppgencdr::config::RunConfig;

RunConfig config_from_options(const std::string& config_path,
                              const std::vector<std::string>& overrides) {
  FlatToml toml = config_path.empty() ? FlatToml::parse_string("")
                                      : FlatToml::parse_file(config_path);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ppgencdr::ConfigError("--set expects key=value, got: " + kv);
    toml.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  return ppgencdr::config::from_toml(toml);
}

void print_budget_json(const ppgencdr::privacy::DpBudget& budget) {
  nlohmann::json j;
  j["epsilon"] = std::isfinite(budget.epsilon)
                     ? nlohmann::json(budget.epsilon)
                     : nlohmann::json("infinity");
  j["delta"] = budget.delta;
  j["best_alpha"] = budget.best_alpha;
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [alpha, eps] : budget.per_alpha)
    per[std::to_string(alpha)] =
        std::isfinite(eps) ? nlohmann::json(eps) : nlohmann::json("infinity");
  j["per_alpha"] = per;
  std::cout << j.dump(2) << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving generative cross-domain recommendation"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_root = "runs";
  app.add_option("--config", config_path, "TOML config file")
      ->envname("PPGENCDR_CONFIG");
  app.add_option("--set", overrides, "override a config key, key=value");
  app.add_option("--out", out_root, "output root directory");

  // prepare: CSVs -> aligned pair + split snapshot
  auto* prepare = app.add_subcommand("prepare", "ingest and split CSV ratings");
  std::string src_csv, tgt_csv, data_dir = "data";
  prepare->add_option("--src", src_csv, "source-domain ratings CSV")
      ->required();
  prepare->add_option("--tgt", tgt_csv, "target-domain ratings CSV")
      ->required();
  prepare->add_option("--data", data_dir, "snapshot output directory");

  // synth: generate a synthetic pair + split snapshot
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic domains");
  synth_cmd->add_option("--data", data_dir, "snapshot output directory");

  // train-source
  auto* train_src = app.add_subcommand("train-source",
                                       "train SPPG and publish the generator");
  train_src->add_option("--data", data_dir, "snapshot directory")->required();

  // train-target
  auto* train_tgt =
      app.add_subcommand("train-target", "train RCDR from a published generator");
  std::string generator_path;
  train_tgt->add_option("--data", data_dir, "snapshot directory")->required();
  train_tgt->add_option("--generator", generator_path, "generator.ppgc path")
      ->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "rank held-out items");
  std::string model_path, which = "test";
  evaluate->add_option("--data", data_dir, "snapshot directory")->required();
  evaluate->add_option("--model", model_path, "rcdr.ppgc path")->required();
  evaluate->add_option("--which", which, "val or test");

  // accountant
  auto* accountant = app.add_subcommand("accountant", "RDP budget calculator");
  double acc_sigma = 1.0, acc_clip = 1.0, acc_delta = 1e-5;
  std::size_t acc_batch = 128, acc_users = 0, acc_steps = 1;
  std::vector<double> acc_alphas = {1.5, 2, 3, 4, 8, 16, 32, 64};
  bool acc_amplified = false;
  accountant->add_option("--sigma", acc_sigma, "noise multiplier");
  accountant->add_option("--clip", acc_clip, "clipping constant B");
  accountant->add_option("--batch", acc_batch, "batch size N");
  accountant->add_option("--users", acc_users, "total user count");
  accountant->add_option("--steps", acc_steps, "number of update steps");
  accountant->add_option("--delta", acc_delta, "DP uncertainty");
  accountant->add_option("--alphas", acc_alphas, "RDP orders");
  accountant->add_flag("--amplified", acc_amplified,
                       "apply subsampling amplification (gamma = N/users)");

  // dirac
  auto* dirac_cmd = app.add_subcommand("dirac", "GAN dynamics simulator");
  ppgencdr::dirac::DiracConfig dcfg;
  std::string traj_path = "trajectory.csv";
  dirac_cmd->add_option("--tau", dcfg.tau, "controller gain");
  dirac_cmd->add_option("--c", dcfg.c, "target constant");
  dirac_cmd->add_option("--phi", dcfg.phi, "perturbation interpolation");
  dirac_cmd->add_option("--sigma-gr", dcfg.sigma_gr, "perturbation magnitude");
  dirac_cmd->add_option("--theta-d0", dcfg.theta_D0, "initial theta_D");
  dirac_cmd->add_option("--theta-g0", dcfg.theta_G0, "initial theta_G");
  dirac_cmd->add_option("--tmax", dcfg.t_max, "horizon");
  dirac_cmd->add_option("--h", dcfg.h, "step size");
  dirac_cmd->add_option("--trajectory", traj_path, "trajectory CSV path");

  auto* run = app.add_subcommand("run", "full pipeline");
  auto* ablate = app.add_subcommand("ablate", "full vs -GS/-RC/-SPP variants");

  CLI11_PARSE(app, argc, argv);

  try {
    if (prepare->parsed()) {
      auto cfg = config_from_options(config_path, overrides);
      cfg.src_path = src_csv;
      cfg.tgt_path = tgt_csv;
      cfg.use_synth = false;
      const auto snap = ppgencdr::pipeline::prepare_data(cfg);
      ppgencdr::dataio::save_snapshot(data_dir, snap.pair, snap.split);
      std::cout << "users=" << snap.pair.source.n_users
                << " src_items=" << snap.pair.source.n_items
                << " tgt_items=" << snap.pair.target.n_items << std::endl;
    } else if (synth_cmd->parsed()) {
      auto cfg = config_from_options(config_path, overrides);
      cfg.use_synth = true;
      const auto snap = ppgencdr::pipeline::prepare_data(cfg);
      ppgencdr::dataio::save_snapshot(data_dir, snap.pair, snap.split);
      std::cout << "users=" << snap.pair.source.n_users
                << " src_items=" << snap.pair.source.n_items
                << " tgt_items=" << snap.pair.target.n_items << std::endl;
    } else if (train_src->parsed()) {
      const auto cfg = config_from_options(config_path, overrides);
      const auto snap = ppgencdr::dataio::load_snapshot(data_dir);
      auto result = ppgencdr::sppg::train(snap.pair, cfg.sppg);
      std::filesystem::create_directories(out_root);
      ppgencdr::sppg::write_losses_csv(out_root + "/sppg_losses.csv",
                                       result.history);
      ppgencdr::snapshot::save_published_generator(
          out_root + "/generator.ppgc", result.published);
      print_budget_json(result.published.final_budget);
    } else if (train_tgt->parsed()) {
      const auto cfg = config_from_options(config_path, overrides);
      const auto snap = ppgencdr::dataio::load_snapshot(data_dir);
      const auto pg =
          ppgencdr::snapshot::load_published_generator(generator_path);
      auto result =
          ppgencdr::rcdr::train_target(snap.pair, snap.split, pg, cfg.rcdr);
      std::filesystem::create_directories(out_root);
      ppgencdr::rcdr::write_losses_csv(out_root + "/rcdr_losses.csv",
                                       result.history);
      ppgencdr::snapshot::save_rcdr_model(out_root + "/rcdr.ppgc",
                                          result.model);
      std::cout << "epochs_run=" << result.epochs_run
                << " best_val_hr10=" << result.best_val_hr10 << std::endl;
    } else if (evaluate->parsed()) {
      const auto snap = ppgencdr::dataio::load_snapshot(data_dir);
      const auto model = ppgencdr::snapshot::load_rcdr_model(model_path);
      if (which != "val" && which != "test")
        throw ppgencdr::ConfigError("--which must be val or test");
      const auto report =
          ppgencdr::rcdr::evaluate(model, snap.split, which == "test");
      std::cout << ppgencdr::pipeline::metrics_to_json(report) << std::endl;
      const auto cfg = config_from_options(config_path, overrides);
      std::filesystem::create_directories(out_root);
      ppgencdr::pipeline::append_results_csv(out_root + "/results.csv",
                                             cfg.hash(), cfg.hash(), which,
                                             report);
    } else if (accountant->parsed()) {
      ppgencdr::privacy::PrivacyParams p;
      p.sigma_p = acc_sigma;
      p.clip_B = acc_clip;
      p.delta = acc_delta;
      p.alpha_grid = acc_alphas;
      p.amplified = acc_amplified;
      if (acc_amplified) {
        if (acc_users == 0)
          throw ppgencdr::ConfigError("--amplified requires --users");
        p.gamma = static_cast<double>(acc_batch) /
                  static_cast<double>(acc_users);
      }
      p.validate();
      ppgencdr::privacy::PrivacyLedger ledger;
      for (std::size_t s = 0; s < acc_steps; ++s)
        ppgencdr::privacy::record_step(ledger, p, acc_batch);
      print_budget_json(
          ppgencdr::privacy::compose_and_convert(ledger, acc_delta,
                                                 p.alpha_grid));
    } else if (dirac_cmd->parsed()) {
      const auto traj = ppgencdr::dirac::simulate(dcfg);
      ppgencdr::dirac::write_trajectory_csv(traj_path, traj);
      const auto [p1, p2] = ppgencdr::dirac::poles(dcfg.tau);
      nlohmann::json j;
      j["poles"] = {{{"re", p1.real()}, {"im", p1.imag()}},
                    {{"re", p2.real()}, {"im", p2.imag()}}};
      j["classification"] = ppgencdr::dirac::stability_name(
          ppgencdr::dirac::stability_report(dcfg.tau));
      j["final"] = {{"t", traj.samples.back().t},
                    {"theta_D", traj.samples.back().theta_D},
                    {"theta_G", traj.samples.back().theta_G},
                    {"V", traj.samples.back().V}};
      std::cout << j.dump(2) << std::endl;
    } else if (run->parsed()) {
      const auto cfg = config_from_options(config_path, overrides);
      const auto result = ppgencdr::pipeline::run_pipeline(cfg, out_root);
      nlohmann::json j;
      j["run_dir"] = result.run_dir;
      j["ledger_steps"] = result.ledger_steps;
      j["epsilon"] = std::isfinite(result.final_epsilon)
                         ? nlohmann::json(result.final_epsilon)
                         : nlohmann::json("infinity");
      j["val"] = nlohmann::json::parse(
          ppgencdr::pipeline::metrics_to_json(result.val));
      j["test"] = nlohmann::json::parse(
          ppgencdr::pipeline::metrics_to_json(result.test));
      std::cout << j.dump(2) << std::endl;
    } else if (ablate->parsed()) {
      const auto cfg = config_from_options(config_path, overrides);
      const auto rows = ppgencdr::pipeline::run_ablation(cfg, out_root);
      std::cout << "variant  hr@5     ndcg@5   mrr@5    hr@10    ndcg@10  "
                   "mrr@10\n";
      for (const auto& row : rows) {
        const auto& m5 = row.test.at_k.at(5);
        const auto& m10 = row.test.at_k.at(10);
        std::printf("%-8s %.5f  %.5f  %.5f  %.5f  %.5f  %.5f\n",
                    row.variant.c_str(), m5.hr, m5.ndcg, m5.mrr, m10.hr,
                    m10.ndcg, m10.mrr);
      }
    }
  } catch (const ppgencdr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return 2;
  } catch (const ppgencdr::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
