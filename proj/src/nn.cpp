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

#include "ppgencdr/nn.hpp"

#include <algorithm>
#include <cmath>

#include "ppgencdr/errors.hpp"

namespace ppgencdr::nn {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
  }
  return "identity";
}

Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::Identity;
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "tanh") return Activation::Tanh;
  throw ConfigError("unknown activation: " + name);
}

void NetworkSpec::validate() const {
  if (input_width() == 0) throw ConfigError("network has zero input width");
  std::size_t prev = input_width();
  for (const auto& l : layers) {
    if (l.in != prev || l.out == 0)
      throw ConfigError("incompatible consecutive layer sizes");
    prev = l.out;
  }
  if (embedding.dim > 0 && embedding.vocab == 0)
    throw ConfigError("embedding with zero vocab");
}

std::size_t Params::n_scalars() const {
  std::size_t n = embedding.size();
  for (std::size_t l = 0; l < weights.size(); ++l)
    n += weights[l].size() + biases[l].size();
  return n;
}

bool Params::same_values(const Params& o) const {
  if (!(embedding == o.embedding) || weights.size() != o.weights.size())
    return false;
  for (std::size_t l = 0; l < weights.size(); ++l)
    if (!(weights[l] == o.weights[l]) || biases[l] != o.biases[l])
      return false;
  return true;
}

Params init_network(const NetworkSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  Params p;
  p.spec = spec;
  if (spec.embedding.dim > 0) {
    const double bound = std::sqrt(
        6.0 / static_cast<double>(spec.embedding.vocab + spec.embedding.dim));
    p.embedding = Matrix(spec.embedding.vocab, spec.embedding.dim);
    for (auto& x : p.embedding.data()) x = rng.uniform(-bound, bound);
  }
  for (const auto& l : spec.layers) {
    const double bound = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    Matrix w(l.out, l.in);
    for (auto& x : w.data()) x = rng.uniform(-bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(l.out, 0.0);
  }
  return p;
}

namespace {

void apply_activation(Matrix& z, Matrix& a, Activation act) {
  a = z;
  switch (act) {
    case Activation::Identity:
      break;
    case Activation::Relu:
      for (auto& x : a.data()) x = x > 0.0 ? x : 0.0;
      break;
    case Activation::Sigmoid:
      for (auto& x : a.data()) x = 1.0 / (1.0 + std::exp(-x));
      break;
    case Activation::Tanh:
      for (auto& x : a.data()) x = std::tanh(x);
      break;
  }
}

// delta *= act'(z), using post-activation values where cheaper.
void apply_activation_grad(Matrix& delta, const Matrix& pre, const Matrix& post,
                           Activation act) {
  switch (act) {
    case Activation::Identity:
      break;
    case Activation::Relu:
      for (std::size_t i = 0; i < delta.size(); ++i)
        if (pre.data()[i] <= 0.0) delta.data()[i] = 0.0;
      break;
    case Activation::Sigmoid:
      for (std::size_t i = 0; i < delta.size(); ++i) {
        const double a = post.data()[i];
        delta.data()[i] *= a * (1.0 - a);
      }
      break;
    case Activation::Tanh:
      for (std::size_t i = 0; i < delta.size(); ++i) {
        const double a = post.data()[i];
        delta.data()[i] *= 1.0 - a * a;
      }
      break;
  }
}

}  // namespace

Trace forward(const Params& p, const Matrix& dense_input,
              const std::vector<std::uint32_t>& ids) {
  const auto& spec = p.spec;
  const std::size_t n =
      spec.dense_input > 0 ? dense_input.rows() : ids.size();
  if (spec.dense_input > 0 && dense_input.cols() != spec.dense_input)
    throw DataError("forward: dense input width mismatch");
  if (spec.embedding.dim > 0 && ids.size() != n)
    throw DataError("forward: id list size mismatch");

  Trace t;
  t.ids = ids;
  t.input = Matrix(n, spec.input_width());
  for (std::size_t i = 0; i < n; ++i) {
    double* row = t.input.row(i);
    for (std::size_t j = 0; j < spec.dense_input; ++j)
      row[j] = dense_input(i, j);
    if (spec.embedding.dim > 0) {
      if (ids[i] >= spec.embedding.vocab)
        throw DataError("forward: id out of range");
      const double* emb = p.embedding.row(ids[i]);
      for (std::size_t j = 0; j < spec.embedding.dim; ++j)
        row[spec.dense_input + j] = emb[j];
    }
  }

  const Matrix* prev = &t.input;
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    Matrix z = matmul_bt(*prev, p.weights[l]);
    for (std::size_t i = 0; i < z.rows(); ++i) {
      double* zi = z.row(i);
      for (std::size_t j = 0; j < z.cols(); ++j) zi[j] += p.biases[l][j];
    }
    Matrix a;
    apply_activation(z, a, spec.layers[l].act);
    t.pre.push_back(std::move(z));
    t.post.push_back(std::move(a));
    prev = &t.post.back();
  }
  return t;
}

Grads backward(const Params& p, const Trace& t, const Matrix& output_grad,
               PerExample scope) {
  const auto& spec = p.spec;
  const std::size_t n = t.input.rows();
  if (output_grad.rows() != n || output_grad.cols() != spec.output_width())
    throw DataError("backward: output_grad shape mismatch");

  Grads g;
  g.weights.resize(spec.layers.size());
  g.biases.resize(spec.layers.size());
  if (scope != PerExample::None) g.per_example.resize(spec.layers.size());
  if (spec.embedding.dim > 0)
    g.embedding = Matrix(spec.embedding.vocab, spec.embedding.dim);

  Matrix delta = output_grad;
  for (std::size_t li = spec.layers.size(); li-- > 0;) {
    apply_activation_grad(delta, t.pre[li], t.post[li], spec.layers[li].act);
    const Matrix& below = li == 0 ? t.input : t.post[li - 1];
    g.weights[li] = matmul_at(delta, below);
    g.biases[li].assign(spec.layers[li].out, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* di = delta.row(i);
      for (std::size_t j = 0; j < delta.cols(); ++j) g.biases[li][j] += di[j];
    }
    const bool want_pe =
        scope == PerExample::AllLayers ||
        (scope == PerExample::FirstLayer && li == 0);
    if (want_pe) {
      const std::size_t w_sz = spec.layers[li].out * spec.layers[li].in;
      auto& pe = g.per_example[li];
      pe.assign(n, std::vector<double>(w_sz + spec.layers[li].out, 0.0));
      for (std::size_t i = 0; i < n; ++i) {
        const double* di = delta.row(i);
        const double* xi = below.row(i);
        auto& flat = pe[i];
        for (std::size_t r = 0; r < spec.layers[li].out; ++r) {
          const double dr = di[r];
          double* dst = flat.data() + r * spec.layers[li].in;
          for (std::size_t c = 0; c < spec.layers[li].in; ++c)
            dst[c] = dr * xi[c];
        }
        for (std::size_t r = 0; r < spec.layers[li].out; ++r)
          flat[w_sz + r] = di[r];
      }
    }
    if (li > 0) delta = matmul(delta, p.weights[li]);
  }

  // Gradient w.r.t. the assembled input, split into dense block and
  // embedding-row scatter.
  Matrix input_grad = spec.layers.empty()
                          ? delta
                          : matmul(delta, p.weights[0]);
  g.dense_input_grad = Matrix(n, spec.dense_input);
  for (std::size_t i = 0; i < n; ++i) {
    const double* gi = input_grad.row(i);
    for (std::size_t j = 0; j < spec.dense_input; ++j)
      g.dense_input_grad(i, j) = gi[j];
    if (spec.embedding.dim > 0) {
      double* erow = g.embedding.row(t.ids[i]);
      for (std::size_t j = 0; j < spec.embedding.dim; ++j)
        erow[j] += gi[spec.dense_input + j];
    }
  }
  return g;
}

void Grads::add(const Grads& o) {
  const auto acc = [](std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  };
  if (!o.embedding.empty()) {
    if (embedding.empty())
      embedding = o.embedding;
    else
      acc(embedding.data(), o.embedding.data());
  }
  for (std::size_t l = 0; l < weights.size(); ++l) {
    acc(weights[l].data(), o.weights[l].data());
    acc(biases[l], o.biases[l]);
  }
  if (per_example.size() < o.per_example.size())
    per_example.resize(o.per_example.size());
  for (std::size_t l = 0; l < o.per_example.size(); ++l) {
    if (o.per_example[l].empty()) continue;
    if (per_example[l].empty()) {
      per_example[l] = o.per_example[l];
    } else {
      for (std::size_t i = 0; i < per_example[l].size(); ++i)
        acc(per_example[l][i], o.per_example[l][i]);
    }
  }
}

double Grads::l2_norm() const {
  double s = 0.0;
  const auto acc = [&s](const std::vector<double>& v) {
    for (const double x : v) s += x * x;
  };
  acc(embedding.data());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    acc(weights[l].data());
    acc(biases[l]);
  }
  return std::sqrt(s);
}

void for_each_tensor(Params& p,
                     const std::function<void(std::vector<double>&)>& f) {
  if (!p.embedding.empty()) f(p.embedding.data());
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    f(p.weights[l].data());
    f(p.biases[l]);
  }
}

void for_each_tensor(const Params& p,
                     const std::function<void(const std::vector<double>&)>& f) {
  if (!p.embedding.empty()) f(p.embedding.data());
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    f(p.weights[l].data());
    f(p.biases[l]);
  }
}

void for_each_tensor(const Grads& g,
                     const std::function<void(const std::vector<double>&)>& f) {
  if (!g.embedding.empty()) f(g.embedding.data());
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    f(g.weights[l].data());
    f(g.biases[l]);
  }
}

void rmsprop_step(Params& p, const Grads& g, RmspropState& state, double eta,
                  double rho, double eps) {
  std::vector<const std::vector<double>*> gs;
  for_each_tensor(g, [&](const std::vector<double>& v) { gs.push_back(&v); });
  if (state.sq.empty()) {
    for (const auto* v : gs) state.sq.emplace_back(v->size(), 0.0);
  }
  std::size_t k = 0;
  for_each_tensor(p, [&](std::vector<double>& theta) {
    const auto& grad = *gs[k];
    auto& sq = state.sq[k];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      sq[i] = rho * sq[i] + (1.0 - rho) * grad[i] * grad[i];
      theta[i] -= eta * grad[i] / (std::sqrt(sq[i]) + eps);
    }
    ++k;
  });
}

void adam_step(Params& p, const Grads& g, AdamState& state, double eta,
               double beta1, double beta2, double eps) {
  std::vector<const std::vector<double>*> gs;
  for_each_tensor(g, [&](const std::vector<double>& v) { gs.push_back(&v); });
  if (state.m.empty()) {
    for (const auto* v : gs) {
      state.m.emplace_back(v->size(), 0.0);
      state.v.emplace_back(v->size(), 0.0);
    }
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  std::size_t k = 0;
  for_each_tensor(p, [&](std::vector<double>& theta) {
    const auto& grad = *gs[k];
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      theta[i] -= eta * mhat / (std::sqrt(vhat) + eps);
    }
    ++k;
  });
}

double grad_check(const std::vector<Params*>& nets,
                  const std::function<double()>& loss,
                  const std::function<std::vector<Grads>()>& analytic,
                  double eps, std::size_t min_coords, std::uint64_t seed) {
  const auto grads = analytic();

  // Flatten (net, tensor, index) coordinates.
  struct Coord {
    std::size_t net, tensor, idx;
  };
  std::vector<Coord> all;
  for (std::size_t ni = 0; ni < nets.size(); ++ni) {
    std::size_t ti = 0;
    for_each_tensor(*nets[ni], [&](std::vector<double>& v) {
      for (std::size_t i = 0; i < v.size(); ++i) all.push_back({ni, ti, i});
      ++ti;
    });
  }
  Rng rng(seed);
  std::vector<Coord> chosen;
  if (all.size() <= min_coords) {
    chosen = all;
  } else {
    rng.shuffle(all);
    chosen.assign(all.begin(), all.begin() + min_coords);
  }

  double max_rel = 0.0;
  for (const auto& c : chosen) {
    std::vector<std::vector<double>*> tensors;
    for_each_tensor(*nets[c.net],
                    [&](std::vector<double>& v) { tensors.push_back(&v); });
    double& theta = (*tensors[c.tensor])[c.idx];
    const double orig = theta;
    theta = orig + eps;
    const double up = loss();
    theta = orig - eps;
    const double down = loss();
    theta = orig;
    const double numeric = (up - down) / (2.0 * eps);

    std::vector<const std::vector<double>*> gts;
    for_each_tensor(grads[c.net], [&](const std::vector<double>& v) {
      gts.push_back(&v);
    });
    const double analytic_val = (*gts[c.tensor])[c.idx];
    const double denom =
        std::max({std::abs(analytic_val), std::abs(numeric), 1e-8});
    max_rel = std::max(max_rel, std::abs(analytic_val - numeric) / denom);
  }
  return max_rel;
}

}  // namespace ppgencdr::nn
