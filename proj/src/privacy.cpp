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

#include "ppgencdr/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppgencdr/errors.hpp"

namespace ppgencdr::privacy {

void PrivacyParams::validate() const {
  if (sigma_p < 0.0) throw ConfigError("sigma_p must be >= 0");
  if (clip_B <= 0.0) throw ConfigError("clip B must be > 0");
  if (delta <= 0.0 || delta >= 1.0) throw ConfigError("delta must be in (0,1)");
  if (gamma <= 0.0 || gamma > 1.0) throw ConfigError("gamma must be in (0,1]");
  if (alpha_grid.empty()) throw ConfigError("alpha grid is empty");
  for (const double a : alpha_grid)
    if (a <= 1.0) throw ConfigError("alpha orders must be > 1");
  if (sigma_p > 0.0 && clip_B != 1.0)
    throw ConfigError("the per-step privacy bound requires clip B = 1");
}

double PrivacyLedger::total_rdp(double alpha) const {
  double total = 0.0;
  for (const auto& s : steps) {
    const auto it = s.rdp_by_alpha.find(alpha);
    if (it == s.rdp_by_alpha.end())
      throw ConfigError("ledger step missing order alpha");
    total += it->second;
  }
  return total;
}

std::vector<double> clip_gradient(std::vector<double> g, double B) {
  if (B <= 0.0) throw ConfigError("clip B must be > 0");
  const double norm = l2_norm(g);
  if (norm > B) {
    const double scale = B / norm;
    for (auto& x : g) x *= scale;
  }
  return g;
}

std::vector<double> gaussian_perturb(std::vector<double> g, double sigma_p,
                                     double B, Rng& rng) {
  if (sigma_p == 0.0) return g;
  const double std_dev = sigma_p * B;
  for (auto& x : g) x += std_dev * rng.normal();
  return g;
}

std::vector<double> clipped_sum(
    const std::vector<std::vector<double>>& per_example, double B) {
  std::vector<double> sum(per_example.empty() ? 0 : per_example[0].size(),
                          0.0);
  for (const auto& pe : per_example) {
    const auto clipped = clip_gradient(pe, B);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += clipped[i];
  }
  return sum;
}

namespace {

void write_back_layer(nn::Grads& grads, std::size_t layer,
                      const std::vector<double>& flat) {
  auto& w = grads.weights[layer];
  const std::size_t w_sz = w.size();
  std::copy(flat.begin(), flat.begin() + w_sz, w.data().begin());
  std::copy(flat.begin() + w_sz, flat.end(), grads.biases[layer].begin());
}

SanitizeReport sanitize_layers(nn::Grads& grads, const PrivacyParams& p,
                               Rng& rng, const std::vector<std::size_t>& layers,
                               double per_layer_B) {
  SanitizeReport report;
  report.sigma_p = p.sigma_p;
  report.clip_B = p.clip_B;
  for (const auto l : layers) {
    if (l >= grads.per_example.size() || grads.per_example[l].empty())
      throw DataError("sanitize: per-example gradients missing for layer " +
                      std::to_string(l));
    report.batch_size = grads.per_example[l].size();
    auto sum = clipped_sum(grads.per_example[l], per_layer_B);
    sum = gaussian_perturb(std::move(sum), p.sigma_p, per_layer_B, rng);
    write_back_layer(grads, l, sum);
    ++report.layers_sanitized;
  }
  return report;
}

}  // namespace

SanitizeReport sanitize_first_layer(nn::Grads& grads, const PrivacyParams& p,
                                    Rng& rng) {
  return sanitize_layers(grads, p, rng, {0}, p.clip_B);
}

SanitizeReport sanitize_all_layers(nn::Grads& grads, const PrivacyParams& p,
                                   Rng& rng) {
  std::vector<std::size_t> layers(grads.weights.size());
  for (std::size_t l = 0; l < layers.size(); ++l) layers[l] = l;
  const double per_layer_B =
      p.clip_B / std::sqrt(static_cast<double>(layers.size()));
  return sanitize_layers(grads, p, rng, layers, per_layer_B);
}

double per_step_rdp(double alpha, double sigma_p, std::size_t batch_size,
                    double B) {
  if (alpha <= 1.0) throw ConfigError("per_step_rdp requires alpha > 1");
  if (sigma_p == 0.0) return std::numeric_limits<double>::infinity();
  if (B != 1.0)
    throw ConfigError("per_step_rdp bound is stated for clip B = 1");
  return 2.0 * static_cast<double>(batch_size) * alpha / (sigma_p * sigma_p);
}

double subsampled_rdp(int alpha, double gamma,
                      const std::function<double(int)>& eps_fn) {
  if (alpha < 2) throw ConfigError("subsampled_rdp requires integer alpha >= 2");
  if (gamma < 0.0 || gamma >= 1.0)
    throw ConfigError("subsampled_rdp requires 0 <= gamma < 1");
  if (gamma == 0.0) return 0.0;

  const double a = static_cast<double>(alpha);
  const double log_ratio = std::log(gamma) - std::log1p(-gamma);

  // log-sum-exp over {1, alpha*gamma/(1-gamma), binom terms}; the exponents
  // e^{(j-1) eps(j)} overflow double for large alpha.
  std::vector<double> log_terms;
  log_terms.push_back(0.0);
  log_terms.push_back(std::log(a) + log_ratio);
  for (int j = 2; j <= alpha; ++j) {
    const double log_binom = std::lgamma(a + 1.0) -
                             std::lgamma(static_cast<double>(j) + 1.0) -
                             std::lgamma(a - static_cast<double>(j) + 1.0);
    log_terms.push_back(log_binom + static_cast<double>(j) * log_ratio +
                        (static_cast<double>(j) - 1.0) * eps_fn(j));
  }
  const double m = *std::max_element(log_terms.begin(), log_terms.end());
  double s = 0.0;
  for (const double t : log_terms) s += std::exp(t - m);
  const double log_sum = m + std::log(s);

  const double value =
      a / (a - 1.0) * std::log1p(-gamma) + log_sum / (a - 1.0);
  return std::max(0.0, value);
}

void record_step(PrivacyLedger& ledger, const PrivacyParams& p,
                 std::size_t batch_size) {
  LedgerStep step;
  ledger.amplified = p.amplified;
  for (const double alpha : p.alpha_grid) {
    if (p.amplified) {
      // Amplification applies to the single-user mechanism; only integer
      // orders are defined for the subsampling bound.
      if (alpha != std::floor(alpha) || alpha < 2.0) continue;
      if (p.sigma_p == 0.0) {
        step.rdp_by_alpha[alpha] = std::numeric_limits<double>::infinity();
        continue;
      }
      const double s2 = p.sigma_p * p.sigma_p;
      step.rdp_by_alpha[alpha] = subsampled_rdp(
          static_cast<int>(alpha), p.gamma,
          [s2](int j) { return 2.0 * static_cast<double>(j) / s2; });
    } else {
      step.rdp_by_alpha[alpha] =
          p.sigma_p == 0.0
              ? std::numeric_limits<double>::infinity()
              : per_step_rdp(alpha, p.sigma_p, batch_size, p.clip_B);
    }
  }
  if (step.rdp_by_alpha.empty())
    throw ConfigError("no usable alpha orders for amplified accounting");
  ledger.steps.push_back(std::move(step));
}

DpBudget compose_and_convert(const PrivacyLedger& ledger, double delta,
                             const std::vector<double>& alpha_grid) {
  if (ledger.steps.empty()) throw ConfigError("privacy ledger is empty");
  if (delta <= 0.0 || delta >= 1.0)
    throw ConfigError("delta must be in (0,1)");
  if (alpha_grid.empty()) throw ConfigError("alpha grid is empty");

  DpBudget budget;
  budget.delta = delta;
  budget.epsilon = std::numeric_limits<double>::infinity();
  for (const double alpha : alpha_grid) {
    if (!ledger.steps[0].rdp_by_alpha.count(alpha)) continue;
    const double total = ledger.total_rdp(alpha);
    const double eps = total + std::log(1.0 / delta) / (alpha - 1.0);
    budget.per_alpha[alpha] = eps;
    if (eps < budget.epsilon) {
      budget.epsilon = eps;
      budget.best_alpha = alpha;
    }
  }
  if (budget.per_alpha.empty())
    throw ConfigError("no alpha order present in the ledger");
  return budget;
}

}  // namespace ppgencdr::privacy
