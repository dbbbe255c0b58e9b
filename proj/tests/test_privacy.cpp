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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "ppgencdr/errors.hpp"
#include "ppgencdr/privacy.hpp"

using namespace ppgencdr;
using namespace ppgencdr::privacy;

TEST_SUITE_BEGIN("privacy");

TEST_CASE("clip_gradient scales down only above the bound") {
  const auto clipped = clip_gradient({3.0, 4.0}, 1.0);
  CHECK(clipped[0] == doctest::Approx(0.6));
  CHECK(clipped[1] == doctest::Approx(0.8));

  const std::vector<double> small = {0.3, 0.4};
  CHECK(clip_gradient(small, 1.0) == small);
  CHECK(clip_gradient({0.0, 0.0}, 1.0) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("gaussian_perturb: sigma zero is the identity") {
  Rng rng(1);
  const std::vector<double> g = {1.0, -2.0, 3.0};
  CHECK(gaussian_perturb(g, 0.0, 1.0, rng) == g);
}

TEST_CASE("gaussian_perturb: empirical std matches sigma * B within 2%") {
  Rng rng(12345);
  const double sigma = 1.3, B = 0.7;
  const std::size_t n = 100000;
  std::vector<double> zeros(n, 0.0);
  const auto noisy = gaussian_perturb(zeros, sigma, B, rng);
  double mean = 0.0;
  for (const double x : noisy) mean += x;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const double x : noisy) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n);
  CHECK(std::sqrt(var) == doctest::Approx(sigma * B).epsilon(0.02));
}

TEST_CASE("gaussian_perturb is reproducible from the rng state") {
  Rng a(7), b(7);
  const std::vector<double> g = {0.1, 0.2, 0.3};
  CHECK(gaussian_perturb(g, 2.0, 1.0, a) == gaussian_perturb(g, 2.0, 1.0, b));
}

namespace {

nn::Grads toy_grads(const std::vector<std::vector<double>>& per_example,
                    std::size_t out, std::size_t in) {
  // Layer 0 is out x in (+ out biases); the flat per-example width must be
  // out*in + out.
  nn::Grads g;
  g.weights = {Matrix(out, in, 0.0), Matrix(1, out, 0.25)};
  g.biases = {std::vector<double>(out, 0.0), std::vector<double>(1, 0.5)};
  g.per_example.resize(1);
  g.per_example[0] = per_example;
  for (const auto& pe : per_example) {
    for (std::size_t i = 0; i < out * in; ++i)
      g.weights[0].data()[i] += pe[i];
    for (std::size_t i = 0; i < out; ++i) g.biases[0][i] += pe[out * in + i];
  }
  return g;
}

}  // namespace

TEST_CASE("sanitize_first_layer: norms within B and sigma 0 reproduce the sum") {
  PrivacyParams p;
  p.sigma_p = 0.0;
  p.clip_B = 1.0;
  // Each per-example vector has norm 0.5 <= B.
  const std::vector<std::vector<double>> pe = {
      {0.3, 0.4, 0.0, 0.0, 0.0, 0.0},
      {0.0, 0.0, 0.3, 0.4, 0.0, 0.0},
  };
  auto g = toy_grads(pe, 2, 2);
  const auto before = g.weights[0];
  const auto before_b = g.biases[0];
  Rng rng(3);
  const auto report = sanitize_first_layer(g, p, rng);
  CHECK(report.batch_size == 2);
  CHECK(g.weights[0] == before);
  CHECK(g.biases[0] == before_b);
}

TEST_CASE("sanitize_first_layer halves an over-norm contribution") {
  PrivacyParams p;
  p.sigma_p = 0.0;
  p.clip_B = 1.0;
  // Single example of norm 2 -> clipped to norm 1, i.e. halved.
  const std::vector<std::vector<double>> pe = {{2.0, 0.0, 0.0, 0.0, 0.0, 0.0}};
  auto g = toy_grads(pe, 2, 2);
  Rng rng(3);
  sanitize_first_layer(g, p, rng);
  CHECK(g.weights[0](0, 0) == doctest::Approx(1.0));
}

TEST_CASE("sanitize leaves non-first-layer tensors bit-identical") {
  PrivacyParams p;
  p.sigma_p = 1.5;
  p.clip_B = 1.0;
  const std::vector<std::vector<double>> pe = {
      {0.3, 0.4, 0.0, 0.0, 0.1, 0.0},
      {0.9, 0.0, 0.3, 0.4, 0.0, 0.2},
  };
  auto g = toy_grads(pe, 2, 2);
  const auto w1_before = g.weights[1];
  const auto b1_before = g.biases[1];
  Rng rng(11);
  sanitize_first_layer(g, p, rng);
  CHECK(g.weights[1] == w1_before);
  CHECK(g.biases[1] == b1_before);
}

TEST_CASE("sanitize without per-example gradients is an error") {
  nn::Grads g;
  g.weights = {Matrix(2, 2, 0.0)};
  g.biases = {std::vector<double>(2, 0.0)};
  PrivacyParams p;
  p.sigma_p = 1.0;
  Rng rng(1);
  CHECK_THROWS_AS(sanitize_first_layer(g, p, rng), DataError);
}

TEST_CASE("sensitivity: clipped sums of neighboring batches differ by <= 2B") {
  // Brute force over random toy batches differing in one example.
  Rng rng(99);
  const double B = 1.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform_int(6);
    const std::size_t dim = 6;
    std::vector<std::vector<double>> batch(n, std::vector<double>(dim));
    for (auto& pe : batch)
      for (auto& x : pe) x = rng.uniform(-3.0, 3.0);
    auto neighbor = batch;
    const std::size_t swap = rng.uniform_int(n);
    for (auto& x : neighbor[swap]) x = rng.uniform(-3.0, 3.0);

    const auto a = clipped_sum(batch, B);
    const auto b = clipped_sum(neighbor, B);
    double diff = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      diff += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK(std::sqrt(diff) <= 2.0 * B + 1e-12);
  }
}

TEST_CASE("per_step_rdp matches the stated bound") {
  CHECK(per_step_rdp(2.0, 1.0, 128, 1.0) == doctest::Approx(512.0));
  CHECK(per_step_rdp(2.0, 2.0, 128, 1.0) == doctest::Approx(128.0));
  CHECK(per_step_rdp(2.0, 2.0, 1, 1.0) == doctest::Approx(1.0));
  CHECK(std::isinf(per_step_rdp(2.0, 0.0, 128, 1.0)));
  CHECK_THROWS_AS(per_step_rdp(2.0, 1.0, 128, 2.0), ConfigError);
  CHECK_THROWS_AS(per_step_rdp(1.0, 1.0, 128, 1.0), ConfigError);
}

TEST_CASE("subsampled_rdp: gamma 0 vanishes") {
  CHECK(subsampled_rdp(2, 0.0, [](int) { return 1.0; }) == 0.0);
}

TEST_CASE("subsampled_rdp matches an independent high-precision evaluation") {
  // alpha=2, gamma=0.5, eps(2)=1: direct long-double evaluation of
  // 2*ln(1/2) + ln(1 + 2 + e).
  const long double direct =
      2.0L * std::log(0.5L) + std::log(1.0L + 2.0L + std::exp(1.0L));
  const double got = subsampled_rdp(2, 0.5, [](int) { return 1.0; });
  CHECK(got == doctest::Approx(static_cast<double>(direct)).epsilon(1e-12));
  CHECK(got == doctest::Approx(0.35741).epsilon(1e-3));
}

TEST_CASE("subsampled_rdp is monotone in gamma") {
  const auto eps_fn = [](int j) { return 0.5 * j; };
  double prev = -1.0;
  for (double gamma = 0.0; gamma < 0.95; gamma += 0.1) {
    const double v = subsampled_rdp(4, gamma, eps_fn);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("subsampled_rdp survives large alpha without overflow") {
  const auto eps_fn = [](int j) { return 2.0 * j; };  // sigma_p = 1
  const double v = subsampled_rdp(64, 0.25, eps_fn);
  CHECK(std::isfinite(v));
  CHECK(v > 0.0);
}

TEST_CASE("amplified cost never exceeds the unamplified bound") {
  // Small sampling rates: the subsampled single-user bound stays below the
  // batch composition bound at the same order.
  const double sigma = 2.0;
  for (const double gamma : {0.01, 0.1, 0.3, 0.5, 0.9}) {
    for (const int alpha : {2, 3, 4, 8}) {
      const double amplified = subsampled_rdp(
          alpha, gamma,
          [sigma](int j) { return 2.0 * j / (sigma * sigma); });
      const double unamplified =
          per_step_rdp(alpha, sigma, 128, 1.0);  // N = 128 batch bound
      CHECK(amplified <= unamplified);
    }
  }
}

TEST_CASE("compose_and_convert: conversion and additivity") {
  PrivacyLedger ledger;
  LedgerStep step;
  step.rdp_by_alpha[2.0] = 1.0;
  ledger.steps.push_back(step);
  const auto budget = compose_and_convert(ledger, 0.01, {2.0});
  CHECK(budget.epsilon == doctest::Approx(1.0 + std::log(100.0)).epsilon(1e-12));
  CHECK(budget.best_alpha == 2.0);

  // T identical steps scale the total linearly at every order.
  PrivacyLedger many;
  for (int t = 0; t < 7; ++t) many.steps.push_back(step);
  CHECK(many.total_rdp(2.0) == doctest::Approx(7.0));
  const auto budget7 = compose_and_convert(many, 0.01, {2.0});
  CHECK(budget7.epsilon ==
        doctest::Approx(7.0 + std::log(100.0)).epsilon(1e-12));
}

TEST_CASE("compose_and_convert picks the best order on a grid") {
  PrivacyLedger ledger;
  LedgerStep step;
  step.rdp_by_alpha[2.0] = 1.0;
  step.rdp_by_alpha[4.0] = 3.0;
  ledger.steps.push_back(step);
  const auto budget = compose_and_convert(ledger, 0.01, {2.0, 4.0});
  CHECK(budget.best_alpha == 4.0);
  CHECK(budget.epsilon ==
        doctest::Approx(3.0 + std::log(100.0) / 3.0).epsilon(1e-9));
  CHECK(budget.epsilon == doctest::Approx(4.53506).epsilon(1e-5));
  CHECK(budget.per_alpha.at(2.0) ==
        doctest::Approx(5.60517).epsilon(1e-5));
}

TEST_CASE("compose_and_convert rejects an empty ledger or bad delta") {
  PrivacyLedger empty;
  CHECK_THROWS_AS(compose_and_convert(empty, 0.01, {2.0}), ConfigError);
  PrivacyLedger one;
  LedgerStep step;
  step.rdp_by_alpha[2.0] = 1.0;
  one.steps.push_back(step);
  CHECK_THROWS_AS(compose_and_convert(one, 0.0, {2.0}), ConfigError);
  CHECK_THROWS_AS(compose_and_convert(one, 1.0, {2.0}), ConfigError);
}

TEST_CASE("accountant monotonicity in steps and noise") {
  PrivacyParams p;
  p.sigma_p = 2.0;
  p.alpha_grid = {2, 3, 4, 8};
  PrivacyLedger ledger;
  double prev = 0.0;
  for (int s = 1; s <= 5; ++s) {
    record_step(ledger, p, 16);
    const auto budget = compose_and_convert(ledger, 1e-5, p.alpha_grid);
    CHECK(budget.epsilon >= prev);
    prev = budget.epsilon;
  }
  // Larger sigma, same steps: epsilon can only drop.
  double prev_eps = std::numeric_limits<double>::infinity();
  for (const double sigma : {1.0, 2.0, 4.0, 8.0}) {
    PrivacyParams q;
    q.sigma_p = sigma;
    q.alpha_grid = {2, 3, 4, 8};
    PrivacyLedger l2;
    for (int s = 0; s < 5; ++s) record_step(l2, q, 16);
    const auto b = compose_and_convert(l2, 1e-5, q.alpha_grid);
    CHECK(b.epsilon <= prev_eps);
    prev_eps = b.epsilon;
  }
}

TEST_CASE("record_step in amplified mode uses integer orders only") {
  PrivacyParams p;
  p.sigma_p = 2.0;
  p.amplified = true;
  p.gamma = 0.25;
  p.alpha_grid = {1.5, 2, 3, 4};
  PrivacyLedger ledger;
  record_step(ledger, p, 16);
  REQUIRE(ledger.steps.size() == 1);
  CHECK(ledger.steps[0].rdp_by_alpha.count(1.5) == 0);
  CHECK(ledger.steps[0].rdp_by_alpha.count(2.0) == 1);
  // Amplified cost at gamma << 1 undercuts the batch bound.
  CHECK(ledger.steps[0].rdp_by_alpha.at(2.0) <
        per_step_rdp(2.0, 2.0, 16, 1.0));
}

TEST_SUITE_END();
