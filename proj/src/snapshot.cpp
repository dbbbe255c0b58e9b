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

#include "ppgencdr/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "ppgencdr/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot writer assumes a little-endian host");

namespace ppgencdr::snapshot {

namespace {

constexpr char kMagic[4] = {'P', 'P', 'G', 'C'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw DataError("snapshot: truncated file");
  return v;
}

nlohmann::json finite_or_label(double v) {
  if (std::isfinite(v)) return v;
  return "infinity";
}

double from_finite_or_label(const nlohmann::json& j) {
  if (j.is_string()) return std::numeric_limits<double>::infinity();
  return j.get<double>();
}

}  // namespace

void write_tensors(const std::string& path,
                   const std::vector<TensorRecord>& tensors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out.write(kMagic, 4);
  write_pod(out, kVersion);
  for (const auto& t : tensors) {
    write_pod(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    write_pod(out, static_cast<std::uint32_t>(t.dims.size()));
    std::uint64_t n = 1;
    for (const auto d : t.dims) {
      write_pod(out, d);
      n *= d;
    }
    if (n != t.values.size())
      throw DataError("snapshot: dims do not match value count");
    out.write(reinterpret_cast<const char*>(t.values.data()),
              static_cast<std::streamsize>(sizeof(double) * t.values.size()));
  }
  if (!out) throw DataError("snapshot: write failed for " + path);
}

std::vector<TensorRecord> read_tensors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("snapshot: bad magic in " + path);
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kVersion)
    throw DataError("snapshot: unsupported version in " + path);

  std::vector<TensorRecord> tensors;
  for (;;) {
    std::uint32_t name_len;
    in.read(reinterpret_cast<char*>(&name_len), sizeof(name_len));
    if (in.eof()) break;
    if (!in) throw DataError("snapshot: truncated file");
    TensorRecord t;
    t.name.resize(name_len);
    in.read(t.name.data(), name_len);
    const auto rank = read_pod<std::uint32_t>(in);
    std::uint64_t n = 1;
    for (std::uint32_t r = 0; r < rank; ++r) {
      t.dims.push_back(read_pod<std::uint64_t>(in));
      n *= t.dims.back();
    }
    t.values.resize(n);
    in.read(reinterpret_cast<char*>(t.values.data()),
            static_cast<std::streamsize>(sizeof(double) * n));
    if (!in) throw DataError("snapshot: truncated tensor " + t.name);
    tensors.push_back(std::move(t));
  }
  return tensors;
}

std::vector<TensorRecord> params_to_tensors(const std::string& prefix,
                                            const nn::Params& p) {
  std::vector<TensorRecord> out;
  if (!p.embedding.empty()) {
    out.push_back({prefix + "/emb",
                   {p.embedding.rows(), p.embedding.cols()},
                   p.embedding.data()});
  }
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    out.push_back({prefix + "/w" + std::to_string(l),
                   {p.weights[l].rows(), p.weights[l].cols()},
                   p.weights[l].data()});
    out.push_back({prefix + "/b" + std::to_string(l),
                   {p.biases[l].size()},
                   p.biases[l]});
  }
  return out;
}

namespace {

const TensorRecord& find_tensor(const std::vector<TensorRecord>& tensors,
                                const std::string& name) {
  for (const auto& t : tensors)
    if (t.name == name) return t;
  throw DataError("snapshot: missing tensor " + name);
}

}  // namespace

nn::Params params_from_tensors(const nn::NetworkSpec& spec,
                               const std::string& prefix,
                               const std::vector<TensorRecord>& tensors) {
  spec.validate();
  nn::Params p;
  p.spec = spec;
  if (spec.embedding.dim > 0) {
    const auto& t = find_tensor(tensors, prefix + "/emb");
    if (t.dims != std::vector<std::uint64_t>{spec.embedding.vocab,
                                             spec.embedding.dim})
      throw DataError("snapshot: embedding shape mismatch");
    p.embedding = Matrix(spec.embedding.vocab, spec.embedding.dim);
    p.embedding.data() = t.values;
  }
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const auto& tw = find_tensor(tensors, prefix + "/w" + std::to_string(l));
    const auto& tb = find_tensor(tensors, prefix + "/b" + std::to_string(l));
    if (tw.dims != std::vector<std::uint64_t>{spec.layers[l].out,
                                              spec.layers[l].in} ||
        tb.dims != std::vector<std::uint64_t>{spec.layers[l].out})
      throw DataError("snapshot: layer shape mismatch at " + tw.name);
    Matrix w(spec.layers[l].out, spec.layers[l].in);
    w.data() = tw.values;
    p.weights.push_back(std::move(w));
    p.biases.push_back(tb.values);
  }
  return p;
}

nlohmann::json spec_to_json(const nn::NetworkSpec& spec) {
  nlohmann::json j;
  j["dense_input"] = spec.dense_input;
  j["embedding"] = {{"vocab", spec.embedding.vocab},
                    {"dim", spec.embedding.dim}};
  j["layers"] = nlohmann::json::array();
  for (const auto& l : spec.layers)
    j["layers"].push_back({{"in", l.in},
                           {"out", l.out},
                           {"act", nn::activation_name(l.act)}});
  return j;
}

nn::NetworkSpec spec_from_json(const nlohmann::json& j) {
  nn::NetworkSpec spec;
  spec.dense_input = j.at("dense_input").get<std::size_t>();
  spec.embedding.vocab = j.at("embedding").at("vocab").get<std::size_t>();
  spec.embedding.dim = j.at("embedding").at("dim").get<std::size_t>();
  for (const auto& l : j.at("layers"))
    spec.layers.push_back(
        {l.at("in").get<std::size_t>(), l.at("out").get<std::size_t>(),
         nn::activation_from_name(l.at("act").get<std::string>())});
  return spec;
}

void save_published_generator(const std::string& path,
                              const sppg::PublishedGenerator& pg) {
  write_tensors(path, params_to_tensors("generator", pg.generator));

  nlohmann::json j;
  j["kind"] = "published_generator";
  j["n_items_source"] = pg.n_items_source;
  j["noise_dim"] = pg.noise_dim;
  j["spec"] = spec_to_json(pg.generator.spec);
  j["final_budget"] = {
      {"epsilon", finite_or_label(pg.final_budget.epsilon)},
      {"delta", pg.final_budget.delta},
      {"best_alpha", pg.final_budget.best_alpha},
  };
  nlohmann::json per_alpha = nlohmann::json::object();
  for (const auto& [alpha, eps] : pg.final_budget.per_alpha)
    per_alpha[std::to_string(alpha)] = finite_or_label(eps);
  j["final_budget"]["per_alpha"] = per_alpha;
  j["fingerprint"] = {
      {"steps", pg.fingerprint.steps},
      {"sigma_p", pg.fingerprint.sigma_p},
      {"clip_B", pg.fingerprint.clip_B},
      {"batch_size", pg.fingerprint.batch_size},
      {"gamma", pg.fingerprint.gamma},
  };
  std::ofstream out(path + ".json");
  if (!out) throw DataError("cannot write " + path + ".json");
  out << j.dump(2) << '\n';
}

sppg::PublishedGenerator load_published_generator(const std::string& path) {
  std::ifstream in(path + ".json");
  if (!in) throw DataError("cannot open " + path + ".json");
  nlohmann::json j;
  in >> j;
  sppg::PublishedGenerator pg;
  pg.n_items_source = j.at("n_items_source").get<std::size_t>();
  pg.noise_dim = j.at("noise_dim").get<std::size_t>();
  const auto spec = spec_from_json(j.at("spec"));
  pg.generator = params_from_tensors(spec, "generator", read_tensors(path));
  const auto& fb = j.at("final_budget");
  pg.final_budget.epsilon = from_finite_or_label(fb.at("epsilon"));
  pg.final_budget.delta = fb.at("delta").get<double>();
  pg.final_budget.best_alpha = fb.at("best_alpha").get<double>();
  for (const auto& [key, val] : fb.at("per_alpha").items())
    pg.final_budget.per_alpha[std::stod(key)] = from_finite_or_label(val);
  const auto& fp = j.at("fingerprint");
  pg.fingerprint.steps = fp.at("steps").get<std::size_t>();
  pg.fingerprint.sigma_p = fp.at("sigma_p").get<double>();
  pg.fingerprint.clip_B = fp.at("clip_B").get<double>();
  pg.fingerprint.batch_size = fp.at("batch_size").get<std::size_t>();
  pg.fingerprint.gamma = fp.at("gamma").get<double>();
  return pg;
}

void save_rcdr_model(const std::string& path, const rcdr::RcdrModel& model) {
  std::vector<TensorRecord> tensors;
  const auto append = [&](const std::string& prefix, const nn::Params& p) {
    auto t = params_to_tensors(prefix, p);
    tensors.insert(tensors.end(), t.begin(), t.end());
  };
  append("encoder", model.encoder);
  append("decoder", model.decoder);
  append("user_tower", model.user_tower);
  append("item_tower", model.item_tower);
  write_tensors(path, tensors);

  nlohmann::json j;
  j["kind"] = "rcdr_model";
  j["lambda_a"] = model.lambda_a;
  j["lambda_r"] = model.lambda_r;
  j["recon_weight"] = model.recon_weight;
  j["pred_weight"] = model.pred_weight;
  j["zscore_eps"] = model.zscore_eps;
  j["id_embeddings"] = model.id_embeddings;
  j["encoder"] = spec_to_json(model.encoder.spec);
  j["decoder"] = spec_to_json(model.decoder.spec);
  j["user_tower"] = spec_to_json(model.user_tower.spec);
  j["item_tower"] = spec_to_json(model.item_tower.spec);
  std::ofstream out(path + ".json");
  if (!out) throw DataError("cannot write " + path + ".json");
  out << j.dump(2) << '\n';
}

rcdr::RcdrModel load_rcdr_model(const std::string& path) {
  std::ifstream in(path + ".json");
  if (!in) throw DataError("cannot open " + path + ".json");
  nlohmann::json j;
  in >> j;
  const auto tensors = read_tensors(path);
  rcdr::RcdrModel model;
  model.encoder =
      params_from_tensors(spec_from_json(j.at("encoder")), "encoder", tensors);
  model.decoder =
      params_from_tensors(spec_from_json(j.at("decoder")), "decoder", tensors);
  model.user_tower = params_from_tensors(spec_from_json(j.at("user_tower")),
                                         "user_tower", tensors);
  model.item_tower = params_from_tensors(spec_from_json(j.at("item_tower")),
                                         "item_tower", tensors);
  model.lambda_a = j.at("lambda_a").get<double>();
  model.lambda_r = j.at("lambda_r").get<double>();
  model.recon_weight = j.at("recon_weight").get<double>();
  model.pred_weight = j.at("pred_weight").get<double>();
  model.zscore_eps = j.at("zscore_eps").get<double>();
  model.id_embeddings = j.at("id_embeddings").get<bool>();
  return model;
}

}  // namespace ppgencdr::snapshot
