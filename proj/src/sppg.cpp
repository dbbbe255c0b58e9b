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

#include "ppgencdr/sppg.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "ppgencdr/errors.hpp"

namespace ppgencdr::sppg {

void SppgConfig::validate() const {
  if (batch_size == 0) throw ConfigError("sppg: batch size must be > 0");
  if (lr <= 0.0) throw ConfigError("sppg: learning rate must be > 0");
  if (tau < 0.0) throw ConfigError("sppg: tau must be >= 0");
  if (critic_steps_per_gen == 0)
    throw ConfigError("sppg: critic_steps_per_gen must be > 0");
  if (k == 0) throw ConfigError("sppg: latent dimension must be > 0");
  privacy.validate();
}

nn::NetworkSpec generator_spec(std::size_t n_users, std::size_t n_items,
                               std::size_t k, std::size_t noise_dim) {
  nn::NetworkSpec spec;
  spec.dense_input = noise_dim;
  spec.embedding = {n_users, k};
  spec.layers = {
      {noise_dim + k, 2 * k, nn::Activation::Relu},
      {2 * k, n_items, nn::Activation::Sigmoid},
  };
  return spec;
}

nn::NetworkSpec critic_spec(std::size_t n_users, std::size_t n_items,
                            std::size_t k) {
  nn::NetworkSpec spec;
  spec.dense_input = n_items;
  spec.embedding = {n_users, k};
  spec.layers = {
      {n_items + k, 2 * k, nn::Activation::Relu},
      {2 * k, 1, nn::Activation::Identity},
  };
  return spec;
}

Matrix generator_forward(const nn::Params& g,
                         const std::vector<std::uint32_t>& user_ids,
                         std::size_t noise_dim, Rng& noise_rng) {
  Matrix noise(user_ids.size(), noise_dim);
  for (auto& x : noise.data()) x = noise_rng.normal();
  return nn::forward(g, noise, user_ids).output();
}

std::vector<double> critic_scores(const nn::Params& d, const Matrix& prefs,
                                  const std::vector<std::uint32_t>& user_ids) {
  const auto trace = nn::forward(d, prefs, user_ids);
  const auto& out = trace.output();
  std::vector<double> scores(out.rows());
  for (std::size_t i = 0; i < out.rows(); ++i) scores[i] = out(i, 0);
  return scores;
}

namespace {

double mean(const std::vector<double>& v) {
  if (v.empty()) throw DataError("mean of empty score vector");
  return std::accumulate(v.begin(), v.end(), 0.0) /
         static_cast<double>(v.size());
}

double mean_sq(const std::vector<double>& v) {
  if (v.empty()) throw DataError("mean of empty score vector");
  double s = 0.0;
  for (const double x : v) s += x * x;
  return s / static_cast<double>(v.size());
}

}  // namespace

WganLosses wgan_losses(const std::vector<double>& scores_real,
                       const std::vector<double>& scores_fake) {
  WganLosses l;
  l.loss_g = mean(scores_fake);
  l.loss_d = mean(scores_real) - mean(scores_fake);
  return l;
}

double gs_regularizer(const std::vector<double>& scores_real,
                      const std::vector<double>& scores_fake, double tau) {
  if (tau < 0.0) throw ConfigError("gs_regularizer: tau must be >= 0");
  return -(tau / 2.0) * (mean_sq(scores_real) + mean_sq(scores_fake));
}

StepReport train_step(SppgModel& model, const Matrix& real_rows,
                      const std::vector<std::uint32_t>& user_ids,
                      nn::RmspropState& opt_critic, nn::RmspropState& opt_gen,
                      Rng& noise_rng, Rng& dp_rng, double lr,
                      bool update_generator) {
  const std::size_t n = user_ids.size();
  if (real_rows.rows() != n) throw DataError("train_step: batch mismatch");
  const double inv_n = 1.0 / static_cast<double>(n);
  const bool sanitized = model.privacy.sigma_p > 0.0;

  StepReport report;

  // Critic ascent on L_D + L_GS. The fake rows are constants here.
  {
    const Matrix fake =
        generator_forward(model.generator, user_ids, model.noise_dim,
                          noise_rng);
    const auto trace_real = nn::forward(model.critic, real_rows, user_ids);
    const auto trace_fake = nn::forward(model.critic, fake, user_ids);
    std::vector<double> s_real(n), s_fake(n);
    for (std::size_t i = 0; i < n; ++i) {
      s_real[i] = trace_real.output()(i, 0);
      s_fake[i] = trace_fake.output()(i, 0);
    }
    const auto losses = wgan_losses(s_real, s_fake);
    report.loss_d = losses.loss_d;
    report.loss_g = losses.loss_g;
    report.loss_gs = gs_regularizer(s_real, s_fake, model.tau);
    if (!std::isfinite(report.loss_d) || !std::isfinite(report.loss_gs))
      throw NumericError("sppg: non-finite critic loss");

    // Descent on -(L_D + L_GS).
    Matrix og_real(n, 1), og_fake(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      og_real(i, 0) = (model.tau * s_real[i] - 1.0) * inv_n;
      og_fake(i, 0) = (1.0 + model.tau * s_fake[i]) * inv_n;
    }
    const auto scope = !sanitized ? nn::PerExample::None
                       : model.whole_model_sanitize
                           ? nn::PerExample::AllLayers
                           : nn::PerExample::FirstLayer;
    nn::Grads grads = nn::backward(model.critic, trace_real, og_real, scope);
    grads.add(nn::backward(model.critic, trace_fake, og_fake, scope));

    if (sanitized) {
      if (model.whole_model_sanitize)
        privacy::sanitize_all_layers(grads, model.privacy, dp_rng);
      else
        privacy::sanitize_first_layer(grads, model.privacy, dp_rng);
    }
    privacy::record_step(model.ledger, model.privacy, n);
    report.grad_norm_d = grads.l2_norm();
    nn::rmsprop_step(model.critic, grads, opt_critic, lr);
  }

  // Generator ascent on L_G, by post-processing only: gradients flow through
  // the critic but never touch real data.
  if (update_generator) {
    Matrix noise(n, model.noise_dim);
    for (auto& x : noise.data()) x = noise_rng.normal();
    const auto trace_g = nn::forward(model.generator, noise, user_ids);
    const auto trace_d = nn::forward(model.critic, trace_g.output(), user_ids);
    Matrix og(n, 1);
    for (std::size_t i = 0; i < n; ++i) og(i, 0) = -inv_n;
    const auto critic_grads = nn::backward(model.critic, trace_d, og);
    const auto gen_grads =
        nn::backward(model.generator, trace_g, critic_grads.dense_input_grad);
    nn::rmsprop_step(model.generator, gen_grads, opt_gen, lr);
  }

  report.ledger_steps = model.ledger.n_steps();
  return report;
}

PublishedGenerator publish(const SppgModel& model, std::size_t n_items_source,
                           std::size_t batch_size) {
  PublishedGenerator pub;
  pub.generator = model.generator;
  pub.n_items_source = n_items_source;
  pub.noise_dim = model.noise_dim;
  pub.fingerprint = {model.ledger.n_steps(), model.privacy.sigma_p,
                     model.privacy.clip_B, batch_size, model.privacy.gamma};
  if (model.ledger.n_steps() == 0) {
    pub.final_budget.epsilon = 0.0;
    pub.final_budget.delta = model.privacy.delta;
    pub.final_budget.best_alpha = 0.0;
  } else {
    pub.final_budget = privacy::compose_and_convert(
        model.ledger, model.privacy.delta, model.privacy.alpha_grid);
  }
  return pub;
}

TrainResult train(const dataio::DomainPair& pair, const SppgConfig& cfg) {
  cfg.validate();
  const auto& src = pair.source;
  if (src.n_users == 0) throw DataError("sppg: empty source domain");

  SeedStream seeds(cfg.seed);
  Rng init_gen = seeds.stream("sppg/init-generator");
  Rng init_critic = seeds.stream("sppg/init-critic");
  Rng shuffle_rng = seeds.stream("sppg/shuffle");
  Rng noise_rng = seeds.stream("sppg/noise");
  Rng dp_rng = seeds.stream("sppg/dp-noise");

  TrainResult result;
  auto& model = result.model;
  model.generator = nn::init_network(
      generator_spec(src.n_users, src.n_items, cfg.k, cfg.noise_dim),
      init_gen.next_u64());
  model.critic = nn::init_network(critic_spec(src.n_users, src.n_items, cfg.k),
                                  init_critic.next_u64());
  model.tau = cfg.tau;
  model.noise_dim = cfg.noise_dim;
  model.privacy = cfg.privacy;
  model.privacy.gamma = std::min(
      1.0, static_cast<double>(cfg.batch_size) / static_cast<double>(src.n_users));
  model.whole_model_sanitize = cfg.whole_model_sanitize;

  nn::RmspropState opt_critic, opt_gen;
  std::vector<std::uint32_t> order(src.n_users);
  std::iota(order.begin(), order.end(), 0);

  std::size_t critic_steps = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += cfg.batch_size) {
      const std::size_t end = std::min(start + cfg.batch_size, order.size());
      const std::vector<std::uint32_t> ids(order.begin() + start,
                                           order.begin() + end);
      Matrix real(ids.size(), src.n_items);
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto row = src.dense_row(ids[i]);
        std::copy(row.begin(), row.end(), real.row(i));
      }
      ++critic_steps;
      const bool update_gen = critic_steps % cfg.critic_steps_per_gen == 0;
      result.history.push_back(train_step(model, real, ids, opt_critic,
                                          opt_gen, noise_rng, dp_rng, cfg.lr,
                                          update_gen));
    }
  }

  result.published = publish(model, src.n_items, cfg.batch_size);
  return result;
}

void write_losses_csv(const std::string& path,
                      const std::vector<StepReport>& history) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "step,L_G,L_D,L_GS,grad_norm_D\n";
  out.precision(17);
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& h = history[i];
    out << i << ',' << h.loss_g << ',' << h.loss_d << ',' << h.loss_gs << ','
        << h.grad_norm_d << '\n';
  }
}

}  // namespace ppgencdr::sppg
