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
#include <string>
#include <vector>

#include "ppgencdr/matrix.hpp"
#include "ppgencdr/rng.hpp"

namespace ppgencdr::nn {

enum class Activation { Identity, Relu, Sigmoid, Tanh };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct LayerSpec {
  std::size_t in = 0;
  std::size_t out = 0;
  Activation act = Activation::Identity;
};

/// Optional id-conditioned embedding table; rows are concatenated after the
/// dense input block. dim == 0 means no embedding.
struct EmbeddingSpec {
  std::size_t vocab = 0;
  std::size_t dim = 0;
};

struct NetworkSpec {
  std::size_t dense_input = 0;
  EmbeddingSpec embedding;
  std::vector<LayerSpec> layers;  // empty => output is the assembled input

  std::size_t input_width() const { return dense_input + embedding.dim; }
  std::size_t output_width() const {
    return layers.empty() ? input_width() : layers.back().out;
  }
  void validate() const;
};

struct Params {
  NetworkSpec spec;
  Matrix embedding;               // [vocab x dim]
  std::vector<Matrix> weights;    // per layer, [out x in]
  std::vector<std::vector<double>> biases;

  std::size_t n_scalars() const;
  bool same_values(const Params& o) const;
};

struct Trace {
  Matrix input;  // assembled [N x input_width]
  std::vector<std::uint32_t> ids;
  std::vector<Matrix> pre;   // z_l
  std::vector<Matrix> post;  // a_l
  const Matrix& output() const { return post.empty() ? input : post.back(); }
};

enum class PerExample { None, FirstLayer, AllLayers };

struct Grads {
  Matrix embedding;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
  // per_example[l][i]: example i's contribution to layer l, flattened as
  // (weight row-major, then bias). Populated per the PerExample request and
  // guaranteed to sum over i to (weights[l], biases[l]).
  std::vector<std::vector<std::vector<double>>> per_example;
  // dLoss/d(dense input block), for chaining into an upstream network.
  Matrix dense_input_grad;

  void add(const Grads& o);
  double l2_norm() const;
};

/// Glorot-uniform weights, zero biases; bit-deterministic in the seed.
Params init_network(const NetworkSpec& spec, std::uint64_t seed);

/// Pure forward pass retaining every intermediate activation.
Trace forward(const Params& p, const Matrix& dense_input,
              const std::vector<std::uint32_t>& ids = {});

/// Reverse-mode gradients of sum(output .* output_grad).
Grads backward(const Params& p, const Trace& t, const Matrix& output_grad,
               PerExample scope = PerExample::None);

struct RmspropState {
  std::vector<std::vector<double>> sq;  // aligned with tensor enumeration
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t step = 0;
};

// s <- rho*s + (1-rho)*g^2 ; theta <- theta - eta * g / (sqrt(s) + eps)
void rmsprop_step(Params& p, const Grads& g, RmspropState& state, double eta,
                  double rho = 0.9, double eps = 1e-8);

/// Bias-corrected Adam update; increments state.step by one.
void adam_step(Params& p, const Grads& g, AdamState& state, double eta,
               double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

/// Visits every parameter tensor of p as a flat vector, in a fixed order
/// (embedding, then per layer weight and bias).
void for_each_tensor(Params& p,
                     const std::function<void(std::vector<double>&)>& f);
void for_each_tensor(const Params& p,
                     const std::function<void(const std::vector<double>&)>& f);
void for_each_tensor(const Grads& g,
                     const std::function<void(const std::vector<double>&)>& f);

// Central finite differences against analytic gradients over a random
// parameter subsample; relative error uses max(|analytic|, |numeric|, 1e-8)
// as denominator. Returns the max over checked coordinates.
double grad_check(const std::vector<Params*>& nets,
                  const std::function<double()>& loss,
                  const std::function<std::vector<Grads>()>& analytic,
                  double eps = 1e-5, std::size_t min_coords = 200,
                  std::uint64_t seed = 17);

}  // namespace ppgencdr::nn
