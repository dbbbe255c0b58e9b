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

#include "ppgencdr/rcdr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "ppgencdr/errors.hpp"

namespace ppgencdr::rcdr {

namespace {
constexpr double kBceClamp = 1e-7;
constexpr double kNormEps = 1e-12;
}  // namespace

void RcdrConfig::validate() const {
  if (batch_size < 2) throw ConfigError("rcdr: batch size must be >= 2");
  if (lr <= 0.0) throw ConfigError("rcdr: learning rate must be > 0");
  if (lambda_a < 0.0 || lambda_r < 0.0)
    throw ConfigError("rcdr: lambda weights must be >= 0");
  if (k == 0) throw ConfigError("rcdr: latent dimension must be > 0");
}

nn::NetworkSpec encoder_spec(std::size_t n_items_src, std::size_t k) {
  nn::NetworkSpec spec;
  spec.dense_input = n_items_src;
  spec.layers = {{n_items_src, k, nn::Activation::Relu},
                 {k, k, nn::Activation::Identity}};
  return spec;
}

nn::NetworkSpec decoder_spec(std::size_t n_items_src, std::size_t k) {
  nn::NetworkSpec spec;
  spec.dense_input = k;
  spec.layers = {{k, k, nn::Activation::Relu},
                 {k, n_items_src, nn::Activation::Sigmoid}};
  return spec;
}

nn::NetworkSpec user_tower_spec(std::size_t n_items_tgt, std::size_t k,
                                bool id_embeddings, std::size_t n_users) {
  nn::NetworkSpec spec;
  if (id_embeddings) {
    spec.embedding = {n_users, k};
    return spec;
  }
  spec.dense_input = n_items_tgt;
  spec.layers = {{n_items_tgt, k, nn::Activation::Relu},
                 {k, k, nn::Activation::Identity}};
  return spec;
}

nn::NetworkSpec item_tower_spec(std::size_t n_users, std::size_t k,
                                bool id_embeddings, std::size_t n_items_tgt) {
  nn::NetworkSpec spec;
  if (id_embeddings) {
    spec.embedding = {n_items_tgt, k};
    return spec;
  }
  spec.dense_input = n_users;
  spec.layers = {{n_users, k, nn::Activation::Relu},
                 {k, k, nn::Activation::Identity}};
  return spec;
}

std::pair<Matrix, Matrix> sample_source_profiles(
    const sppg::PublishedGenerator& pg, const nn::Params& encoder,
    const std::vector<std::uint32_t>& user_ids, Rng& noise_rng) {
  if (pg.n_items_source != encoder.spec.dense_input)
    throw DataError("published generator width does not match encoder input");
  Matrix fake =
      sppg::generator_forward(pg.generator, user_ids, pg.noise_dim, noise_rng);
  Matrix z_s = nn::forward(encoder, fake).output();
  return {std::move(fake), std::move(z_s)};
}

double recon_loss(const nn::Params& decoder, const Matrix& z_s,
                  const Matrix& rows) {
  const auto out = nn::forward(decoder, z_s).output();
  if (out.rows() != rows.rows() || out.cols() != rows.cols())
    throw DataError("recon_loss: shape mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = out.data()[i] - rows.data()[i];
    loss += d * d;
  }
  return loss;
}

double align_loss(const Matrix& z_s, const Matrix& z_t) {
  if (z_s.rows() != z_t.rows() || z_s.cols() != z_t.cols())
    throw DataError("align_loss: shape mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < z_s.size(); ++i) {
    const double d = z_s.data()[i] - z_t.data()[i];
    loss += d * d;
  }
  return loss;
}

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double bce_term(double p, double y) {
  p = std::min(1.0 - kBceClamp, std::max(kBceClamp, p));
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

}  // namespace

double predict_and_bce(const Matrix& z_t, const Matrix& v_t,
                       const std::vector<Triple>& triples) {
  if (triples.empty()) throw DataError("predict_and_bce: no triples");
  double loss = 0.0;
  for (const auto& tr : triples) {
    double t = 0.0;
    const double* zu = z_t.row(tr.user_pos);
    const double* vj = v_t.row(tr.item_pos);
    for (std::size_t d = 0; d < z_t.cols(); ++d) t += zu[d] * vj[d];
    loss += bce_term(sigmoid(t), tr.label);
  }
  return loss / static_cast<double>(triples.size());
}

Matrix zscore_columns(const Matrix& x, double eps) {
  if (x.rows() < 2) throw DataError("zscore_columns: need at least 2 rows");
  const auto n = static_cast<double>(x.rows());
  Matrix out(x.rows(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double mu = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mu += x(i, j);
    mu /= n;
    double var = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double y = x(i, j) - mu;
      var += y * y;
    }
    const double w = 1.0 / (std::sqrt(var / n) + eps);
    for (std::size_t i = 0; i < x.rows(); ++i) out(i, j) = (x(i, j) - mu) * w;
  }
  return out;
}

Matrix cross_correlation(const Matrix& xbar) {
  const std::size_t k = xbar.cols();
  std::vector<double> nu(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < xbar.rows(); ++i) s += xbar(i, j) * xbar(i, j);
    nu[j] = std::sqrt(s) + kNormEps;
  }
  Matrix c(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < xbar.rows(); ++i) s += xbar(i, a) * xbar(i, b);
      const double v = s / (nu[a] * nu[b]);
      c(a, b) = v;
      c(b, a) = v;
    }
  }
  return c;
}

namespace {

double decorrelation_term(const Matrix& x, double eps) {
  const auto c = cross_correlation(zscore_columns(x, eps));
  double loss = 0.0;
  for (std::size_t a = 0; a < c.rows(); ++a)
    for (std::size_t b = 0; b < c.cols(); ++b) {
      const double d = c(a, b) - (a == b ? 1.0 : 0.0);
      loss += d * d;
    }
  return loss;
}

// Value and gradient of |C(zscore(X)) - I|_F^2 w.r.t. X.
std::pair<double, Matrix> decorrelation_term_grad(const Matrix& x,
                                                  double eps) {
  const std::size_t n = x.rows();
  const std::size_t k = x.cols();
  const auto nd = static_cast<double>(n);

  // z-score with retained per-column statistics.
  std::vector<double> mu(k, 0.0), sd(k, 0.0), w(k, 0.0);
  Matrix y(n, k);   // centered
  Matrix xb(n, k);  // z-scored
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) mu[j] += x(i, j);
    mu[j] /= nd;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y(i, j) = x(i, j) - mu[j];
      var += y(i, j) * y(i, j);
    }
    sd[j] = std::sqrt(var / nd);
    w[j] = 1.0 / (sd[j] + eps);
    for (std::size_t i = 0; i < n; ++i) xb(i, j) = y(i, j) * w[j];
  }

  // Column normalization u_j = xb_j / nu_j and C = U^T U.
  std::vector<double> nu(k, 0.0), raw_norm(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += xb(i, j) * xb(i, j);
    raw_norm[j] = std::sqrt(s);
    nu[j] = raw_norm[j] + kNormEps;
  }
  Matrix u(n, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < n; ++i) u(i, j) = xb(i, j) / nu[j];
  const Matrix c = matmul_at(u, u);

  double loss = 0.0;
  Matrix a(k, k);
  for (std::size_t p = 0; p < k; ++p)
    for (std::size_t q = 0; q < k; ++q) {
      const double d = c(p, q) - (p == q ? 1.0 : 0.0);
      loss += d * d;
      a(p, q) = 2.0 * d;
    }

  // dL/dU = U A (A symmetric), then back through the column normalization:
  // dL/dxb_j = gu_j / nu_j - (xb_j . gu_j) / (nu_j^2 |xb_j|) * xb_j.
  const Matrix gu = matmul(u, a);
  Matrix gxb(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += xb(i, j) * gu(i, j);
    const double scale =
        raw_norm[j] > 0.0 ? proj / (nu[j] * nu[j] * raw_norm[j]) : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      gxb(i, j) = gu(i, j) / nu[j] - scale * xb(i, j);
  }

  // Back through the z-score.
  Matrix gx(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    double sdot = 0.0;
    for (std::size_t i = 0; i < n; ++i) sdot += gxb(i, j) * y(i, j);
    const double f =
        sd[j] > 0.0 ? w[j] * w[j] * sdot / (nd * sd[j]) : 0.0;
    double col_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      gx(i, j) = gxb(i, j) * w[j] - f * y(i, j);
      col_mean += gx(i, j);
    }
    col_mean /= nd;
    for (std::size_t i = 0; i < n; ++i) gx(i, j) -= col_mean;
  }
  return {loss, std::move(gx)};
}

}  // namespace

double rc_loss(const Matrix& z_t, const Matrix& v_t, double eps) {
  return decorrelation_term(z_t, eps) + decorrelation_term(v_t, eps);
}

LossBreakdown total_loss(const RcdrModel& model, double recon, double pred,
                         double align, double rc) {
  LossBreakdown l;
  l.recon = recon;
  l.pred = pred;
  l.align = align;
  l.rc = rc;
  l.total = model.recon_weight * recon + model.pred_weight * pred +
            model.lambda_a * align + model.lambda_r * rc;
  return l;
}

BatchGrads batch_forward_backward(const RcdrModel& model, const Batch& batch) {
  const std::size_t n = batch.user_ids.size();
  const std::size_t k = model.encoder.spec.output_width();

  // Forward passes.
  const auto trace_enc = nn::forward(model.encoder, batch.fake_rows);
  const Matrix& z_s = trace_enc.output();
  const auto trace_dec = nn::forward(model.decoder, z_s);
  const Matrix& recon_out = trace_dec.output();

  const auto trace_ut =
      model.id_embeddings
          ? nn::forward(model.user_tower, Matrix(), batch.user_ids)
          : nn::forward(model.user_tower, batch.user_rows);
  const Matrix& z_t = trace_ut.output();
  const auto trace_it =
      model.id_embeddings
          ? nn::forward(model.item_tower, Matrix(), batch.items)
          : nn::forward(model.item_tower, batch.item_cols);
  const Matrix& v_t = trace_it.output();

  // Losses.
  double recon = 0.0;
  for (std::size_t i = 0; i < recon_out.size(); ++i) {
    const double d = recon_out.data()[i] - batch.fake_rows.data()[i];
    recon += d * d;
  }
  const double align = align_loss(z_s, z_t);
  const double pred = predict_and_bce(z_t, v_t, batch.triples);
  const auto [rc_z, grc_z] = decorrelation_term_grad(z_t, model.zscore_eps);
  const auto [rc_v, grc_v] = decorrelation_term_grad(v_t, model.zscore_eps);

  BatchGrads out;
  out.losses = total_loss(model, recon, pred, align, rc_z + rc_v);
  if (!std::isfinite(out.losses.total))
    throw NumericError("rcdr: non-finite loss");

  // Decoder (reconstruction), chaining into the encoder input gradient.
  Matrix og_dec(recon_out.rows(), recon_out.cols());
  for (std::size_t i = 0; i < recon_out.size(); ++i)
    og_dec.data()[i] = model.recon_weight * 2.0 *
                       (recon_out.data()[i] - batch.fake_rows.data()[i]);
  out.decoder = nn::backward(model.decoder, trace_dec, og_dec);

  // Encoder: reconstruction path plus alignment pull toward Z_T.
  Matrix og_enc = out.decoder.dense_input_grad;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < k; ++d)
      og_enc(i, d) += model.lambda_a * 2.0 * (z_s(i, d) - z_t(i, d));
  out.encoder = nn::backward(model.encoder, trace_enc, og_enc);

  // Prediction gradients scattered onto the profile rows.
  Matrix og_zt(n, k, 0.0);
  Matrix og_vt(v_t.rows(), k, 0.0);
  const double inv_m = 1.0 / static_cast<double>(batch.triples.size());
  for (const auto& tr : batch.triples) {
    double t = 0.0;
    const double* zu = z_t.row(tr.user_pos);
    const double* vj = v_t.row(tr.item_pos);
    for (std::size_t d = 0; d < k; ++d) t += zu[d] * vj[d];
    const double p = sigmoid(t);
    if (p <= kBceClamp || p >= 1.0 - kBceClamp) continue;  // clamped: flat
    const double gt = model.pred_weight * (p - tr.label) * inv_m;
    double* gz = og_zt.row(tr.user_pos);
    double* gv = og_vt.row(tr.item_pos);
    for (std::size_t d = 0; d < k; ++d) {
      gz[d] += gt * vj[d];
      gv[d] += gt * zu[d];
    }
  }

  // Alignment and decorrelation terms on the towers.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < k; ++d)
      og_zt(i, d) += model.lambda_a * -2.0 * (z_s(i, d) - z_t(i, d)) +
                     model.lambda_r * grc_z(i, d);
  for (std::size_t i = 0; i < v_t.rows(); ++i)
    for (std::size_t d = 0; d < k; ++d)
      og_vt(i, d) += model.lambda_r * grc_v(i, d);

  out.user_tower = nn::backward(model.user_tower, trace_ut, og_zt);
  out.item_tower = nn::backward(model.item_tower, trace_it, og_vt);
  return out;
}

eval::MetricsReport evaluate(const RcdrModel& model,
                             const dataio::EvalSplit& split, bool use_test) {
  const auto& train = split.train_target;
  const std::size_t n_users = train.n_users;
  const std::size_t n_items = train.n_items;

  Matrix z_all, v_all;
  if (model.id_embeddings) {
    std::vector<std::uint32_t> uids(n_users), iids(n_items);
    std::iota(uids.begin(), uids.end(), 0);
    std::iota(iids.begin(), iids.end(), 0);
    z_all = nn::forward(model.user_tower, Matrix(), uids).output();
    v_all = nn::forward(model.item_tower, Matrix(), iids).output();
  } else {
    Matrix rows(n_users, n_items);
    for (std::size_t u = 0; u < n_users; ++u) {
      const auto r = train.dense_row(u);
      std::copy(r.begin(), r.end(), rows.row(u));
    }
    z_all = nn::forward(model.user_tower, rows).output();
    Matrix cols(n_items, n_users);
    for (std::size_t i = 0; i < n_items; ++i) {
      const auto c = train.dense_col(static_cast<std::uint32_t>(i));
      std::copy(c.begin(), c.end(), cols.row(i));
    }
    v_all = nn::forward(model.item_tower, cols).output();
  }

  const auto& held = use_test ? split.test : split.val;
  std::vector<std::size_t> ranks;
  ranks.reserve(n_users);
  for (std::size_t u = 0; u < n_users; ++u) {
    std::vector<std::uint32_t> cand;
    cand.push_back(held[u].item);
    cand.insert(cand.end(), held[u].negatives.begin(),
                held[u].negatives.end());
    std::vector<double> scores(cand.size());
    const double* zu = z_all.row(u);
    for (std::size_t c = 0; c < cand.size(); ++c) {
      const double* vj = v_all.row(cand[c]);
      double t = 0.0;
      for (std::size_t d = 0; d < z_all.cols(); ++d) t += zu[d] * vj[d];
      scores[c] = sigmoid(t);
    }
    ranks.push_back(eval::rank_position(scores, cand, 0));
  }
  return eval::metrics_from_ranks(ranks);
}

namespace {

struct Snapshot4 {
  nn::Params encoder, decoder, user_tower, item_tower;
};

std::vector<std::vector<std::uint32_t>> make_batches(std::size_t n_users,
                                                     std::size_t batch_size,
                                                     Rng& rng) {
  std::vector<std::uint32_t> order(n_users);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<std::vector<std::uint32_t>> batches;
  for (std::size_t start = 0; start < n_users; start += batch_size) {
    const std::size_t end = std::min(start + batch_size, n_users);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  // A 1-user tail cannot be z-scored; fold it into the previous batch.
  if (batches.size() > 1 && batches.back().size() < 2) {
    batches[batches.size() - 2].push_back(batches.back()[0]);
    batches.pop_back();
  }
  return batches;
}

}  // namespace

Batch build_batch(const dataio::BinaryRatingMatrix& train,
                  const std::vector<std::uint32_t>& user_ids,
                  const Matrix& fake_rows, std::size_t neg_ratio, Rng& rng) {
  Batch batch;
  batch.user_ids = user_ids;
  batch.fake_rows = fake_rows;

  batch.user_rows = Matrix(user_ids.size(), train.n_items);
  for (std::size_t i = 0; i < user_ids.size(); ++i) {
    const auto row = train.dense_row(user_ids[i]);
    std::copy(row.begin(), row.end(), batch.user_rows.row(i));
  }

  std::unordered_map<std::uint32_t, std::size_t> item_pos;
  const auto intern = [&](std::uint32_t item) {
    const auto it = item_pos.find(item);
    if (it != item_pos.end()) return it->second;
    const std::size_t pos = batch.items.size();
    item_pos.emplace(item, pos);
    batch.items.push_back(item);
    return pos;
  };

  for (std::size_t i = 0; i < user_ids.size(); ++i) {
    const auto u = user_ids[i];
    if (train.user_items[u].size() + neg_ratio > train.n_items)
      throw DataError("rcdr: user has too few unrated items for negatives");
    for (const auto item : train.user_items[u]) {
      batch.triples.push_back({i, intern(item), 1.0});
      for (std::size_t neg = 0; neg < neg_ratio; ++neg) {
        for (;;) {
          const auto cand =
              static_cast<std::uint32_t>(rng.uniform_int(train.n_items));
          if (train.has(u, cand)) continue;
          batch.triples.push_back({i, intern(cand), 0.0});
          break;
        }
      }
    }
  }
  if (batch.items.size() < 2)
    throw DataError("rcdr batch references fewer than 2 items");

  batch.item_cols = Matrix(batch.items.size(), train.n_users);
  for (std::size_t j = 0; j < batch.items.size(); ++j) {
    const auto col = train.dense_col(batch.items[j]);
    std::copy(col.begin(), col.end(), batch.item_cols.row(j));
  }
  return batch;
}

TrainResult train_target(const dataio::DomainPair& pair,
                         const dataio::EvalSplit& split,
                         const sppg::PublishedGenerator& pg,
                         const RcdrConfig& cfg) {
  cfg.validate();
  const auto& train = split.train_target;
  const std::size_t n_users = train.n_users;
  if (pair.target.n_users != n_users)
    throw DataError("rcdr: split does not match the domain pair");
  if (pg.n_items_source == 0) throw DataError("rcdr: empty generator");

  SeedStream seeds(cfg.seed);
  Rng init_rng = seeds.stream("rcdr/init");
  Rng shuffle_rng = seeds.stream("rcdr/shuffle");
  Rng neg_rng = seeds.stream("rcdr/negatives");
  Rng noise_rng = seeds.stream("rcdr/noise");

  TrainResult result;
  auto& model = result.model;
  model.encoder =
      nn::init_network(encoder_spec(pg.n_items_source, cfg.k),
                       init_rng.next_u64());
  model.decoder =
      nn::init_network(decoder_spec(pg.n_items_source, cfg.k),
                       init_rng.next_u64());
  model.user_tower = nn::init_network(
      user_tower_spec(train.n_items, cfg.k, cfg.id_embeddings, n_users),
      init_rng.next_u64());
  model.item_tower = nn::init_network(
      item_tower_spec(n_users, cfg.k, cfg.id_embeddings, train.n_items),
      init_rng.next_u64());
  model.lambda_a = cfg.lambda_a;
  model.lambda_r = cfg.lambda_r;
  model.recon_weight = cfg.recon_weight;
  model.pred_weight = cfg.pred_weight;
  model.zscore_eps = cfg.zscore_eps;
  model.id_embeddings = cfg.id_embeddings;

  // With the noise input disabled the published generator is a fixed map, so
  // its rows can be produced once up front.
  Matrix all_fake;
  if (cfg.zero_source) {
    all_fake = Matrix(n_users, pg.n_items_source, 0.0);
  } else if (pg.noise_dim == 0) {
    std::vector<std::uint32_t> uids(n_users);
    std::iota(uids.begin(), uids.end(), 0);
    all_fake = sppg::generator_forward(pg.generator, uids, 0, noise_rng);
  }

  nn::AdamState opt_enc, opt_dec, opt_ut, opt_it;
  Snapshot4 best;
  double best_val = -1.0;
  std::size_t wait = 0;
  std::size_t epochs_run = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    ++epochs_run;
    const auto batches = make_batches(n_users, cfg.batch_size, shuffle_rng);
    for (const auto& ids : batches) {
      Matrix fake(ids.size(), pg.n_items_source);
      if (cfg.zero_source || pg.noise_dim == 0) {
        for (std::size_t i = 0; i < ids.size(); ++i)
          std::copy(all_fake.row(ids[i]), all_fake.row(ids[i]) + all_fake.cols(),
                    fake.row(i));
      } else {
        fake = sppg::generator_forward(pg.generator, ids, pg.noise_dim,
                                       noise_rng);
      }
      auto batch = build_batch(train, ids, fake, cfg.neg_ratio, neg_rng);
      const auto grads = batch_forward_backward(model, batch);
      result.history.push_back(grads.losses);
      nn::adam_step(model.encoder, grads.encoder, opt_enc, cfg.lr);
      nn::adam_step(model.decoder, grads.decoder, opt_dec, cfg.lr);
      nn::adam_step(model.user_tower, grads.user_tower, opt_ut, cfg.lr);
      nn::adam_step(model.item_tower, grads.item_tower, opt_it, cfg.lr);
    }

    if (cfg.patience > 0) {
      const auto report = evaluate(model, split, /*use_test=*/false);
      const double hr10 = report.at_k.at(10).hr;
      if (hr10 > best_val + 1e-12) {
        best_val = hr10;
        best = {model.encoder, model.decoder, model.user_tower,
                model.item_tower};
        wait = 0;
      } else if (++wait >= cfg.patience) {
        break;
      }
    }
  }

  if (cfg.patience > 0 && best_val >= 0.0) {
    model.encoder = std::move(best.encoder);
    model.decoder = std::move(best.decoder);
    model.user_tower = std::move(best.user_tower);
    model.item_tower = std::move(best.item_tower);
    result.best_val_hr10 = best_val;
  }
  result.epochs_run = epochs_run;
  return result;
}

void write_losses_csv(const std::string& path,
                      const std::vector<LossBreakdown>& history) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "step,recon,pred,align,rc,total\n";
  out.precision(17);
  for (std::size_t i = 0; i < history.size(); ++i) {
    const auto& h = history[i];
    out << i << ',' << h.recon << ',' << h.pred << ',' << h.align << ','
        << h.rc << ',' << h.total << '\n';
  }
}

}  // namespace ppgencdr::rcdr
