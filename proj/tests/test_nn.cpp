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

#include "ppgencdr/nn.hpp"

using namespace ppgencdr;
using namespace ppgencdr::nn;

namespace {

NetworkSpec mlp(std::size_t in, std::size_t hidden, std::size_t out,
                Activation mid = Activation::Relu,
                Activation last = Activation::Identity) {
  NetworkSpec spec;
  spec.dense_input = in;
  spec.layers = {{in, hidden, mid}, {hidden, out, last}};
  return spec;
}

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  Matrix m(r, c);
  for (auto& x : m.data()) x = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("nn");

TEST_CASE("init is deterministic, zero-biased and bounded") {
  NetworkSpec spec = mlp(10, 10, 10);
  const auto a = init_network(spec, 99);
  const auto b = init_network(spec, 99);
  CHECK(a.same_values(b));
  const auto c = init_network(spec, 100);
  CHECK_FALSE(a.same_values(c));
  const double bound = std::sqrt(6.0 / 20.0);
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    for (const double w : a.weights[l].data()) {
      CHECK(w >= -bound);
      CHECK(w <= bound);
    }
    for (const double bv : a.biases[l]) CHECK(bv == 0.0);
  }
}

TEST_CASE("forward: zero weights with sigmoid output gives 0.5") {
  NetworkSpec spec = mlp(4, 3, 2, Activation::Relu, Activation::Sigmoid);
  auto p = init_network(spec, 1);
  for (auto& w : p.weights)
    for (auto& x : w.data()) x = 0.0;
  Rng rng(5);
  const auto t = forward(p, random_matrix(3, 4, rng));
  for (const double v : t.output().data()) CHECK(v == 0.5);
}

TEST_CASE("forward: identity single layer with W = I reproduces the input") {
  NetworkSpec spec;
  spec.dense_input = 3;
  spec.layers = {{3, 3, Activation::Identity}};
  auto p = init_network(spec, 1);
  for (auto& x : p.weights[0].data()) x = 0.0;
  for (std::size_t i = 0; i < 3; ++i) p.weights[0](i, i) = 1.0;
  Rng rng(7);
  const auto in = random_matrix(2, 3, rng);
  const auto t = forward(p, in);
  CHECK(t.output() == in);
}

TEST_CASE("forward: a batch equals stacked single-sample calls") {
  NetworkSpec spec = mlp(5, 4, 3, Activation::Tanh, Activation::Sigmoid);
  const auto p = init_network(spec, 11);
  Rng rng(13);
  const auto batch = random_matrix(2, 5, rng);
  const auto full = forward(p, batch);
  for (std::size_t i = 0; i < 2; ++i) {
    Matrix single(1, 5);
    for (std::size_t j = 0; j < 5; ++j) single(0, j) = batch(i, j);
    const auto one = forward(p, single);
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(one.output()(0, j) == full.output()(i, j));
  }
}

TEST_CASE("forward is pure: equal inputs give bit-identical outputs") {
  NetworkSpec spec = mlp(6, 5, 4);
  const auto p = init_network(spec, 3);
  Rng rng(17);
  const auto in = random_matrix(4, 6, rng);
  CHECK(forward(p, in).output() == forward(p, in).output());
}

TEST_CASE("backward: single linear layer gradient pattern") {
  // loss = sum(W x): dL/dW = 1 * x^T on x = [1, 2].
  NetworkSpec spec;
  spec.dense_input = 2;
  spec.layers = {{2, 1, Activation::Identity}};
  const auto p = init_network(spec, 2);
  Matrix x(1, 2);
  x(0, 0) = 1.0;
  x(0, 1) = 2.0;
  const auto t = forward(p, x);
  Matrix og(1, 1);
  og(0, 0) = 1.0;
  const auto g = backward(p, t, og);
  CHECK(g.weights[0](0, 0) == doctest::Approx(1.0));
  CHECK(g.weights[0](0, 1) == doctest::Approx(2.0));
  CHECK(g.biases[0][0] == doctest::Approx(1.0));
}

TEST_CASE("backward: zero output gradient gives zero grads") {
  NetworkSpec spec = mlp(4, 3, 2);
  const auto p = init_network(spec, 5);
  Rng rng(19);
  const auto t = forward(p, random_matrix(3, 4, rng));
  const auto g = backward(p, t, Matrix(3, 2, 0.0));
  for_each_tensor(g, [](const std::vector<double>& v) {
    for (const double x : v) CHECK(x == 0.0);
  });
}

TEST_CASE("per-example first-layer gradients sum to the aggregate") {
  NetworkSpec spec = mlp(7, 6, 2, Activation::Relu, Activation::Sigmoid);
  spec.embedding = {9, 3};
  spec.layers[0].in += 3;
  const auto p = init_network(spec, 23);
  Rng rng(29);
  const auto in = random_matrix(5, 7, rng);
  const std::vector<std::uint32_t> ids = {0, 3, 3, 8, 1};
  const auto t = forward(p, in, ids);
  const auto og = random_matrix(5, 2, rng);
  const auto g = backward(p, t, og, PerExample::FirstLayer);
  REQUIRE(g.per_example.size() == 2);
  REQUIRE(g.per_example[0].size() == 5);
  CHECK(g.per_example[1].empty());

  const std::size_t w_sz = spec.layers[0].out * spec.layers[0].in;
  std::vector<double> sum(w_sz + spec.layers[0].out, 0.0);
  for (const auto& pe : g.per_example[0])
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += pe[i];
  for (std::size_t i = 0; i < w_sz; ++i)
    CHECK(std::abs(sum[i] - g.weights[0].data()[i]) < 1e-10);
  for (std::size_t i = 0; i < spec.layers[0].out; ++i)
    CHECK(std::abs(sum[w_sz + i] - g.biases[0][i]) < 1e-10);
}

TEST_CASE("per-example all-layers materialization matches aggregates") {
  NetworkSpec spec = mlp(5, 4, 1);
  const auto p = init_network(spec, 31);
  Rng rng(37);
  const auto t = forward(p, random_matrix(6, 5, rng));
  const auto og = random_matrix(6, 1, rng);
  const auto g = backward(p, t, og, PerExample::AllLayers);
  for (std::size_t l = 0; l < 2; ++l) {
    REQUIRE(g.per_example[l].size() == 6);
    const std::size_t w_sz = spec.layers[l].out * spec.layers[l].in;
    std::vector<double> sum(w_sz + spec.layers[l].out, 0.0);
    for (const auto& pe : g.per_example[l])
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += pe[i];
    for (std::size_t i = 0; i < w_sz; ++i)
      CHECK(std::abs(sum[i] - g.weights[l].data()[i]) < 1e-10);
  }
}

TEST_CASE("grad_check: quadratic loss is exact to rounding") {
  NetworkSpec spec = mlp(4, 4, 2);
  auto p = init_network(spec, 41);
  const Params& cp = p;
  const auto loss = [&]() {
    double s = 0.0;
    for_each_tensor(cp, [&](const std::vector<double>& v) {
      for (const double x : v) s += 0.5 * x * x;
    });
    return s;
  };
  const auto analytic = [&]() {
    Grads g;
    g.weights = {p.weights[0], p.weights[1]};
    g.biases = {p.biases[0], p.biases[1]};
    return std::vector<Grads>{std::move(g)};
  };
  CHECK(grad_check({&p}, loss, analytic) < 1e-7);
}

TEST_CASE("grad_check: mlp loss through backward") {
  NetworkSpec spec = mlp(6, 8, 3, Activation::Tanh, Activation::Sigmoid);
  auto p = init_network(spec, 43);
  Rng rng(47);
  const auto in = random_matrix(5, 6, rng);
  const auto target = random_matrix(5, 3, rng);
  const auto loss = [&]() {
    const auto out = forward(p, in).output();
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double d = out.data()[i] - target.data()[i];
      s += d * d;
    }
    return s;
  };
  const auto analytic = [&]() {
    const auto t = forward(p, in);
    Matrix og(5, 3);
    for (std::size_t i = 0; i < og.size(); ++i)
      og.data()[i] = 2.0 * (t.output().data()[i] - target.data()[i]);
    return std::vector<Grads>{backward(p, t, og)};
  };
  CHECK(grad_check({&p}, loss, analytic) < 1e-6);
}

TEST_CASE("rmsprop first step matches the hand-evaluated update") {
  NetworkSpec spec;
  spec.dense_input = 1;
  spec.layers = {{1, 1, Activation::Identity}};
  auto p = init_network(spec, 2);
  const double theta0 = p.weights[0](0, 0);
  Grads g;
  g.weights = {Matrix(1, 1, 1.0)};
  g.biases = {{0.0}};
  RmspropState state;
  rmsprop_step(p, g, state, 0.01);
  // s = 0.1, step = 0.01 / (sqrt(0.1) + 1e-8)
  const double expected = 0.01 / (std::sqrt(0.1) + 1e-8);
  CHECK(p.weights[0](0, 0) ==
        doctest::Approx(theta0 - expected).epsilon(1e-12));
  CHECK(theta0 - p.weights[0](0, 0) ==
        doctest::Approx(0.031623).epsilon(1e-4));
}

TEST_CASE("rmsprop: zero gradient leaves parameters unchanged") {
  NetworkSpec spec = mlp(3, 3, 1);
  auto p = init_network(spec, 3);
  const auto before = p;
  Grads g;
  g.weights = {Matrix(3, 3, 0.0), Matrix(1, 3, 0.0)};
  g.biases = {std::vector<double>(3, 0.0), std::vector<double>(1, 0.0)};
  RmspropState state;
  rmsprop_step(p, g, state, 0.5);
  rmsprop_step(p, g, state, 0.5);
  CHECK(p.same_values(before));
}

TEST_CASE("adam first step moves by about eta regardless of scale") {
  for (const double eta : {0.001, 0.1, 1.0}) {
    NetworkSpec spec;
    spec.dense_input = 1;
    spec.layers = {{1, 1, Activation::Identity}};
    auto p = init_network(spec, 4);
    const double theta0 = p.weights[0](0, 0);
    Grads g;
    g.weights = {Matrix(1, 1, 1.0)};
    g.biases = {{0.0}};
    AdamState state;
    adam_step(p, g, state, eta);
    CHECK(p.weights[0](0, 0) == doctest::Approx(theta0 - eta).epsilon(1e-6));
  }
}

TEST_CASE("adam: zero gradients keep parameters fixed, counter advances") {
  NetworkSpec spec = mlp(2, 2, 1);
  auto p = init_network(spec, 6);
  const auto before = p;
  Grads g;
  g.weights = {Matrix(2, 2, 0.0), Matrix(1, 2, 0.0)};
  g.biases = {std::vector<double>(2, 0.0), std::vector<double>(1, 0.0)};
  AdamState state;
  adam_step(p, g, state, 0.1);
  CHECK(state.step == 1);
  adam_step(p, g, state, 0.1);
  CHECK(state.step == 2);
  CHECK(p.same_values(before));
}

TEST_CASE("embedding-only network passes rows through and scatters grads") {
  NetworkSpec spec;
  spec.embedding = {4, 3};
  const auto p = init_network(spec, 8);
  const std::vector<std::uint32_t> ids = {2, 2, 0};
  const auto t = forward(p, Matrix(), ids);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(t.output()(0, j) == p.embedding(2, j));
    CHECK(t.output()(2, j) == p.embedding(0, j));
  }
  Matrix og(3, 3, 1.0);
  const auto g = backward(p, t, og);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(g.embedding(2, j) == 2.0);  // two lookups of row 2
    CHECK(g.embedding(0, j) == 1.0);
    CHECK(g.embedding(1, j) == 0.0);
  }
}

TEST_SUITE_END();
