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
#include <functional>
#include <map>
#include <vector>

#include "ppgencdr/nn.hpp"
#include "ppgencdr/rng.hpp"

namespace ppgencdr::privacy {

struct PrivacyParams {
  double sigma_p = 0.0;  // noise multiplier; 0 means privacy off
  double clip_B = 1.0;   // per-example L2 clipping bound
  double delta = 1e-5;
  std::vector<double> alpha_grid = {1.5, 2, 3, 4, 8, 16, 32, 64};
  double gamma = 1.0;  // sampling rate batch/users, used when amplified
  bool amplified = false;

  void validate() const;
};

/// One sanitized update step's RDP cost per order alpha.
struct LedgerStep {
  std::map<double, double> rdp_by_alpha;
};

/// Records each critic update's RDP cost; cumulative cost at every alpha is
/// non-decreasing in the step count.
struct PrivacyLedger {
  std::vector<LedgerStep> steps;
  bool amplified = false;

  std::size_t n_steps() const { return steps.size(); }
  double total_rdp(double alpha) const;
};

struct DpBudget {
  double epsilon = 0.0;
  double delta = 0.0;
  double best_alpha = 0.0;
  std::map<double, double> per_alpha;  // DP epsilon per order
};

/// g / max(1, |g|_2 / B); output norm is at most B.
std::vector<double> clip_gradient(std::vector<double> g, double B);

/// Adds i.i.d. Gaussian noise with per-coordinate std sigma_p * B.
std::vector<double> gaussian_perturb(std::vector<double> g, double sigma_p,
                                     double B, Rng& rng);

/// Clips each per-example vector to norm B and sums in example order.
/// This pre-noise sum is the statistic whose L2 sensitivity is bounded by 2B
/// across batches differing in one user.
std::vector<double> clipped_sum(
    const std::vector<std::vector<double>>& per_example, double B);

struct SanitizeReport {
  std::size_t batch_size = 0;
  double sigma_p = 0.0;
  double clip_B = 0.0;
  std::size_t layers_sanitized = 0;
};

// Replaces the first layer's aggregate gradient with the noised clipped sum
// of its per-example gradients; every other tensor passes through untouched.
SanitizeReport sanitize_first_layer(nn::Grads& grads, const PrivacyParams& p,
                                    Rng& rng);

// Ablation variant: sanitizes every dense layer, splitting the clip budget as
// B/sqrt(L) per layer so the joint sensitivity stays within 2B.
SanitizeReport sanitize_all_layers(nn::Grads& grads, const PrivacyParams& p,
                                   Rng& rng);

/// Theorem bound for one batch update: 2*N*alpha / sigma_p^2 (requires B=1).
/// sigma_p == 0 yields +infinity.
double per_step_rdp(double alpha, double sigma_p, std::size_t batch_size,
                    double B);

/// Subsampled-mechanism RDP at integer alpha >= 2 with sampling rate gamma,
/// given the base mechanism's cost eps_fn(j) for j in 2..alpha.
double subsampled_rdp(int alpha, double gamma,
                      const std::function<double(int)>& eps_fn);

/// Appends one step's cost at every grid order. In amplified mode the cost is
/// the subsampled single-user bound at integer orders; otherwise the batch
/// composition bound at every order.
void record_step(PrivacyLedger& ledger, const PrivacyParams& p,
                 std::size_t batch_size);

/// Sums RDP over steps per order, converts to (epsilon, delta)-DP, and picks
/// the order minimizing epsilon.
DpBudget compose_and_convert(const PrivacyLedger& ledger, double delta,
                             const std::vector<double>& alpha_grid);

}  // namespace ppgencdr::privacy
