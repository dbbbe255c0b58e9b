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

#pragma once

#include <string>
#include <vector>

#include "ppgencdr/config.hpp"
#include "ppgencdr/dataio.hpp"
#include "ppgencdr/eval.hpp"
#include "ppgencdr/rcdr.hpp"
#include "ppgencdr/sppg.hpp"

namespace ppgencdr::pipeline {

/// Builds the domain pair + split from CSVs or the synthetic spec.
dataio::Snapshot prepare_data(const config::RunConfig& cfg);

struct RunResult {
  std::string run_dir;
  eval::MetricsReport val;
  eval::MetricsReport test;
  double final_epsilon = 0.0;
  std::size_t ledger_steps = 0;
};

// prepare -> train-source -> publish -> train-target -> evaluate, with every
// artifact under <out_root>/<config hash>/.
RunResult run_pipeline(const config::RunConfig& cfg,
                       const std::string& out_root);

struct AblationRow {
  std::string variant;
  eval::MetricsReport test;
};

/// Runs {full, -GS, -RC, -SPP} with shared data/split seeds.
std::vector<AblationRow> run_ablation(const config::RunConfig& cfg,
                                      const std::string& out_root);

void append_results_csv(const std::string& path, const std::string& run_id,
                        const std::string& config_hash,
                        const std::string& which,
                        const eval::MetricsReport& report);

std::string metrics_to_json(const eval::MetricsReport& report);

}  // namespace ppgencdr::pipeline
