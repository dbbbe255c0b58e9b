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

#include "ppgencdr/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ppgencdr/errors.hpp"
#include "ppgencdr/snapshot.hpp"
#include "ppgencdr/synth.hpp"

namespace ppgencdr::pipeline {

dataio::Snapshot prepare_data(const config::RunConfig& cfg) {
  dataio::Snapshot snap;
  if (cfg.use_synth) {
    // Synthetic pairs are valid by construction and are not re-filtered.
    snap.pair = synth::generate_synthetic(cfg.synth_spec);
  } else {
    const auto src_raw = dataio::load_ratings(cfg.src_path);
    const auto tgt_raw = dataio::load_ratings(cfg.tgt_path);
    snap.pair = dataio::align_domains(
        dataio::binarize(src_raw, cfg.binarize_threshold),
        dataio::binarize(tgt_raw, cfg.binarize_threshold),
        cfg.min_interactions);
  }
  snap.split = dataio::make_eval_split(snap.pair, cfg.n_negatives, cfg.seed);
  return snap;
}

namespace {

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

void append_results_csv(const std::string& path, const std::string& run_id,
                        const std::string& config_hash,
                        const std::string& which,
                        const eval::MetricsReport& report) {
  const bool fresh = !std::filesystem::exists(path);
  std::ofstream out(path, std::ios::app);
  if (!out) throw DataError("cannot append to " + path);
  if (fresh)
    out << "run_id,config_hash,timestamp,split,n_users,hr5,ndcg5,mrr5,hr10,"
           "ndcg10,mrr10\n";
  out.precision(17);
  const auto& m5 = report.at_k.at(5);
  const auto& m10 = report.at_k.at(10);
  out << run_id << ',' << config_hash << ',' << timestamp_utc() << ',' << which
      << ',' << report.n_users << ',' << m5.hr << ',' << m5.ndcg << ','
      << m5.mrr << ',' << m10.hr << ',' << m10.ndcg << ',' << m10.mrr << '\n';
}

std::string metrics_to_json(const eval::MetricsReport& report) {
  nlohmann::json j;
  j["n_users"] = report.n_users;
  for (const auto& [k, m] : report.at_k) {
    const std::string suffix = "@" + std::to_string(k);
    j["hr" + suffix] = m.hr;
    j["ndcg" + suffix] = m.ndcg;
    j["mrr" + suffix] = m.mrr;
  }
  return j.dump(2);
}

RunResult run_pipeline(const config::RunConfig& cfg,
                       const std::string& out_root) {
  cfg.validate();
  RunResult result;
  result.run_dir = out_root + "/" + cfg.hash();
  std::filesystem::create_directories(result.run_dir);

  const auto snap = prepare_data(cfg);
  dataio::save_snapshot(result.run_dir, snap.pair, snap.split);

  auto sppg_result = sppg::train(snap.pair, cfg.sppg);
  sppg::write_losses_csv(result.run_dir + "/sppg_losses.csv",
                         sppg_result.history);
  snapshot::save_published_generator(result.run_dir + "/generator.ppgc",
                                     sppg_result.published);
  result.final_epsilon = sppg_result.published.final_budget.epsilon;
  result.ledger_steps = sppg_result.published.fingerprint.steps;

  auto rcdr_result = rcdr::train_target(snap.pair, snap.split,
                                        sppg_result.published, cfg.rcdr);
  rcdr::write_losses_csv(result.run_dir + "/rcdr_losses.csv",
                         rcdr_result.history);
  snapshot::save_rcdr_model(result.run_dir + "/rcdr.ppgc", rcdr_result.model);

  result.val = rcdr::evaluate(rcdr_result.model, snap.split, false);
  result.test = rcdr::evaluate(rcdr_result.model, snap.split, true);
  append_results_csv(result.run_dir + "/results.csv", cfg.hash(), cfg.hash(),
                     "val", result.val);
  append_results_csv(result.run_dir + "/results.csv", cfg.hash(), cfg.hash(),
                     "test", result.test);
  return result;
}

std::vector<AblationRow> run_ablation(const config::RunConfig& cfg,
                                      const std::string& out_root) {
  cfg.validate();
  const auto snap = prepare_data(cfg);

  // Data and split come from cfg.seed for every variant, so metric deltas
  // are attributable to the ablated component alone.
  struct Variant {
    std::string name;
    config::RunConfig cfg;
  };
  std::vector<Variant> variants;
  variants.push_back({"full", cfg});
  {
    auto v = cfg;
    v.sppg.tau = 0.0;
    variants.push_back({"-GS", v});
  }
  {
    auto v = cfg;
    v.rcdr.lambda_r = 0.0;
    variants.push_back({"-RC", v});
  }
  {
    auto v = cfg;
    v.sppg.whole_model_sanitize = true;
    variants.push_back({"-SPP", v});
  }

  std::vector<AblationRow> rows;
  // SPPG results are shared between variants with identical source configs.
  std::vector<std::pair<std::string, sppg::PublishedGenerator>> cache;
  const auto sppg_key = [](const config::RunConfig& c) {
    return std::to_string(c.sppg.tau) + "|" +
           std::to_string(c.sppg.whole_model_sanitize) + "|" +
           std::to_string(c.sppg.privacy.sigma_p);
  };
  std::filesystem::create_directories(out_root);
  std::ofstream table(out_root + "/ablation.csv");
  table << "variant,hr5,ndcg5,mrr5,hr10,ndcg10,mrr10\n";
  table.precision(17);
  for (const auto& v : variants) {
    const auto key = sppg_key(v.cfg);
    const sppg::PublishedGenerator* pg = nullptr;
    for (const auto& [k, g] : cache)
      if (k == key) pg = &g;
    if (pg == nullptr) {
      auto trained = sppg::train(snap.pair, v.cfg.sppg);
      cache.emplace_back(key, std::move(trained.published));
      pg = &cache.back().second;
    }
    const auto rcdr_result =
        rcdr::train_target(snap.pair, snap.split, *pg, v.cfg.rcdr);
    AblationRow row;
    row.variant = v.name;
    row.test = rcdr::evaluate(rcdr_result.model, snap.split, true);
    const auto& m5 = row.test.at_k.at(5);
    const auto& m10 = row.test.at_k.at(10);
    table << row.variant << ',' << m5.hr << ',' << m5.ndcg << ',' << m5.mrr
          << ',' << m10.hr << ',' << m10.ndcg << ',' << m10.mrr << '\n';
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ppgencdr::pipeline
