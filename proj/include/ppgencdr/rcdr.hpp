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
#include "ppgencdr/eval.hpp"
#include "ppgencdr/nn.hpp"
#include "ppgencdr/sppg.hpp"

namespace ppgencdr::rcdr {

struct RcdrConfig {
  std::size_t epochs = 0;
  std::size_t batch_size = 128;
  double lr = 0.01;
  double lambda_a = 1.0;  // alignment weight
  double lambda_r = 0.5;  // robustness weight
  double recon_weight = 1.0;
  double pred_weight = 1.0;
  std::size_t neg_ratio = 4;  // sampled negatives per training positive
  std::size_t k = 200;
  std::size_t patience = 10;  // early-stop patience on val HR@10; 0 disables
  double zscore_eps = 1e-5;
  bool id_embeddings = false;  // lookup tables instead of profile towers
  bool zero_source = false;    // baseline: generator rows replaced by zeros
  std::uint64_t seed = 1;

  void validate() const;
};

struct RcdrModel {
  nn::Params encoder;
  nn::Params decoder;
  nn::Params user_tower;
  nn::Params item_tower;
  double lambda_a = 1.0;
  double lambda_r = 0.5;
  double recon_weight = 1.0;
  double pred_weight = 1.0;
  double zscore_eps = 1e-5;
  bool id_embeddings = false;
};

nn::NetworkSpec encoder_spec(std::size_t n_items_src, std::size_t k);
nn::NetworkSpec decoder_spec(std::size_t n_items_src, std::size_t k);
nn::NetworkSpec user_tower_spec(std::size_t n_items_tgt, std::size_t k,
                                bool id_embeddings, std::size_t n_users);
nn::NetworkSpec item_tower_spec(std::size_t n_users, std::size_t k,
                                bool id_embeddings, std::size_t n_items_tgt);

/// Generator rows for the given users and their encoded profiles Z_S. The
/// published generator is read-only here.
std::pair<Matrix, Matrix> sample_source_profiles(
    const sppg::PublishedGenerator& pg, const nn::Params& encoder,
    const std::vector<std::uint32_t>& user_ids, Rng& noise_rng);

/// Squared Frobenius reconstruction error of Dec(Z_S) against the rows.
double recon_loss(const nn::Params& decoder, const Matrix& z_s,
                  const Matrix& rows);

/// Sum of squared user-profile gaps between domains.
double align_loss(const Matrix& z_s, const Matrix& z_t);

struct Triple {
  std::size_t user_pos = 0;  // row in the batch's Z_T
  std::size_t item_pos = 0;  // row in the batch's V_T
  double label = 0.0;
};

/// Mean binary cross entropy of sigmoid(z_u . v_j) over the triples, with the
/// prediction clamped to [1e-7, 1 - 1e-7].
double predict_and_bce(const Matrix& z_t, const Matrix& v_t,
                       const std::vector<Triple>& triples);

/// Per column: subtract the mean, divide by (population std + eps).
Matrix zscore_columns(const Matrix& x, double eps);

/// C_ij = <x_i, x_j> / ((|x_i| + 1e-12) (|x_j| + 1e-12)) over columns.
Matrix cross_correlation(const Matrix& xbar);

/// |C(zscore(Z)) - I|_F^2 + |C(zscore(V)) - I|_F^2.
double rc_loss(const Matrix& z_t, const Matrix& v_t, double eps);

struct LossBreakdown {
  double recon = 0.0;
  double pred = 0.0;
  double align = 0.0;
  double rc = 0.0;
  double total = 0.0;
};

/// Weighted Eq.-style total: recon + pred + lambda_A*align + lambda_R*rc
/// (with the recon/pred test weights applied).
LossBreakdown total_loss(const RcdrModel& model, double recon, double pred,
                         double align, double rc);

/// One training batch: generator samples, target rows, prediction triples.
struct Batch {
  std::vector<std::uint32_t> user_ids;
  Matrix fake_rows;   // generator output, treated as constant
  Matrix user_rows;   // target-domain training rows for the batch users
  std::vector<std::uint32_t> items;  // unique items referenced by triples
  Matrix item_cols;   // their training columns, [items x n_users]
  std::vector<Triple> triples;
};

struct BatchGrads {
  LossBreakdown losses;
  nn::Grads encoder;
  nn::Grads decoder;
  nn::Grads user_tower;
  nn::Grads item_tower;
};

/// Full forward/backward of the joint objective on one batch.
BatchGrads batch_forward_backward(const RcdrModel& model, const Batch& batch);

/// Assembles rows, columns and (positive + neg_ratio sampled negative)
/// prediction triples for one user batch of the training matrix.
Batch build_batch(const dataio::BinaryRatingMatrix& train,
                  const std::vector<std::uint32_t>& user_ids,
                  const Matrix& fake_rows, std::size_t neg_ratio, Rng& rng);

eval::MetricsReport evaluate(const RcdrModel& model,
                             const dataio::EvalSplit& split, bool use_test);

struct TrainResult {
  RcdrModel model;
  std::vector<LossBreakdown> history;  // one row per step
  double best_val_hr10 = 0.0;
  std::size_t epochs_run = 0;
};

TrainResult train_target(const dataio::DomainPair& pair,
                         const dataio::EvalSplit& split,
                         const sppg::PublishedGenerator& pg,
                         const RcdrConfig& cfg);

void write_losses_csv(const std::string& path,
                      const std::vector<LossBreakdown>& history);

}  // namespace ppgencdr::rcdr
