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

#include <cstdint>
#include <string>
#include <vector>

#include "ppgencdr/dataio.hpp"
#include "ppgencdr/nn.hpp"
#include "ppgencdr/privacy.hpp"

namespace ppgencdr::sppg {

struct SppgConfig {
  std::size_t epochs = 0;
  std::size_t batch_size = 128;
  double lr = 0.01;
  double tau = 2.0;  // GS coefficient
  std::size_t critic_steps_per_gen = 1;
  std::size_t noise_dim = 0;  // generator noise input width; 0 disables it
  std::size_t k = 200;        // latent dimension
  privacy::PrivacyParams privacy;
  bool whole_model_sanitize = false;  // sanitize every critic layer (-SPP)
  std::uint64_t seed = 1;

  void validate() const;
};

/// Conditional generator + Wasserstein critic with privacy state.
struct SppgModel {
  nn::Params generator;
  nn::Params critic;
  double tau = 0.0;
  std::size_t noise_dim = 0;
  privacy::PrivacyParams privacy;
  privacy::PrivacyLedger ledger;
  bool whole_model_sanitize = false;
};

struct Fingerprint {
  std::size_t steps = 0;
  double sigma_p = 0.0;
  double clip_B = 1.0;
  std::size_t batch_size = 0;
  double gamma = 1.0;
};

/// The frozen generator as published to the target domain, with the privacy
/// budget fixed at publication time.
struct PublishedGenerator {
  nn::Params generator;
  std::size_t n_items_source = 0;
  std::size_t noise_dim = 0;
  privacy::DpBudget final_budget;
  Fingerprint fingerprint;
};

nn::NetworkSpec generator_spec(std::size_t n_users, std::size_t n_items,
                               std::size_t k, std::size_t noise_dim);
nn::NetworkSpec critic_spec(std::size_t n_users, std::size_t n_items,
                            std::size_t k);

/// Fake preference rows in (0,1)^{n_items}, one per user id.
Matrix generator_forward(const nn::Params& g,
                         const std::vector<std::uint32_t>& user_ids,
                         std::size_t noise_dim, Rng& noise_rng);

/// Unbounded critic score per preference row.
std::vector<double> critic_scores(const nn::Params& d, const Matrix& prefs,
                                  const std::vector<std::uint32_t>& user_ids);

struct WganLosses {
  double loss_g = 0.0;  // E[D(fake)]
  double loss_d = 0.0;  // E[D(real)] - E[D(fake)]
};

/// Both losses are objectives their players maximize.
WganLosses wgan_losses(const std::vector<double>& scores_real,
                       const std::vector<double>& scores_fake);

/// -(tau/2) * (E[D(real)^2] + E[D(fake)^2]); added to the critic objective.
double gs_regularizer(const std::vector<double>& scores_real,
                      const std::vector<double>& scores_fake, double tau);

struct StepReport {
  double loss_g = 0.0;
  double loss_d = 0.0;
  double loss_gs = 0.0;
  double grad_norm_d = 0.0;  // norm of the applied critic gradient
  std::size_t ledger_steps = 0;
};

// One critic ascent step (sanitized when sigma_p > 0) and optionally one
// generator ascent step. sigma_p == 0 trains fully unsanitized so the run is
// bit-identical to a plain WGAN given equal seeds.
StepReport train_step(SppgModel& model, const Matrix& real_rows,
                      const std::vector<std::uint32_t>& user_ids,
                      nn::RmspropState& opt_critic, nn::RmspropState& opt_gen,
                      Rng& noise_rng, Rng& dp_rng, double lr,
                      bool update_generator);

struct TrainResult {
  SppgModel model;
  PublishedGenerator published;
  std::vector<StepReport> history;  // one row per critic step
};

TrainResult train(const dataio::DomainPair& pair, const SppgConfig& cfg);

PublishedGenerator publish(const SppgModel& model, std::size_t n_items_source,
                           std::size_t batch_size);

void write_losses_csv(const std::string& path,
                      const std::vector<StepReport>& history);

}  // namespace ppgencdr::sppg
