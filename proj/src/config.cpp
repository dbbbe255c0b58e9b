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

#include "ppgencdr/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ppgencdr/errors.hpp"
#include "ppgencdr/rng.hpp"

namespace ppgencdr::config {

namespace {

std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

}  // namespace

FlatToml FlatToml::parse_string(const std::string& text) {
  FlatToml toml;
  std::stringstream ss(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key or value");
    if (!section.empty()) key = section + "." + key;
    toml.values_[key] = value;
  }
  return toml;
}

FlatToml FlatToml::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

double FlatToml::get_number(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: " +
                      it->second);
  }
}

std::int64_t FlatToml::get_int(const std::string& key,
                               std::int64_t fallback) const {
  const double v = get_number(key, static_cast<double>(fallback));
  const auto i = static_cast<std::int64_t>(v);
  if (static_cast<double>(i) != v)
    throw ConfigError("config key '" + key + "' must be an integer");
  return i;
}

bool FlatToml::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second == "true") return true;
  if (it->second == "false") return false;
  throw ConfigError("config key '" + key + "' must be true or false");
}

std::string FlatToml::get_string(const std::string& key,
                                 const std::string& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::string v = it->second;
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
    return v.substr(1, v.size() - 2);
  return v;
}

std::vector<double> FlatToml::get_array(
    const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& v = it->second;
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw ConfigError("config key '" + key + "' must be an array");
  std::vector<double> out;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' has non-numeric entry: " +
                        item);
    }
  }
  return out;
}

void FlatToml::set(const std::string& key, const std::string& raw_value) {
  values_[key] = raw_value;
}

void RunConfig::validate() const {
  if (!use_synth && (src_path.empty() || tgt_path.empty()))
    throw ConfigError("either dataset paths or a synth spec is required");
  if (use_synth) synth_spec.validate();
  sppg.validate();
  rcdr.validate();
  if (eval_ks.empty()) throw ConfigError("eval ks must be non-empty");
}

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  const auto num = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  kv["seed"] = std::to_string(seed);
  kv["dataset.src"] = src_path;
  kv["dataset.tgt"] = tgt_path;
  kv["dataset.threshold"] = num(binarize_threshold);
  kv["dataset.min_interactions"] = std::to_string(min_interactions);
  kv["dataset.negatives"] = std::to_string(n_negatives);
  kv["synth.enabled"] = use_synth ? "true" : "false";
  if (use_synth) {
    kv["synth.users"] = std::to_string(synth_spec.n_users);
    kv["synth.items_src"] = std::to_string(synth_spec.n_items_src);
    kv["synth.items_tgt"] = std::to_string(synth_spec.n_items_tgt);
    kv["synth.clusters"] = std::to_string(synth_spec.n_clusters);
    kv["synth.pos_src"] = std::to_string(synth_spec.positives_per_user_src);
    kv["synth.pos_tgt"] = std::to_string(synth_spec.positives_per_user_tgt);
    kv["synth.flip"] = num(synth_spec.noise_flip_prob);
    kv["synth.seed"] = std::to_string(synth_spec.seed);
  }
  kv["sppg.epochs"] = std::to_string(sppg.epochs);
  kv["sppg.batch"] = std::to_string(sppg.batch_size);
  kv["sppg.lr"] = num(sppg.lr);
  kv["sppg.tau"] = num(sppg.tau);
  kv["sppg.critic_steps"] = std::to_string(sppg.critic_steps_per_gen);
  kv["sppg.noise_dim"] = std::to_string(sppg.noise_dim);
  kv["sppg.k"] = std::to_string(sppg.k);
  kv["sppg.sigma_p"] = num(sppg.privacy.sigma_p);
  kv["sppg.clip"] = num(sppg.privacy.clip_B);
  kv["sppg.delta"] = num(sppg.privacy.delta);
  kv["sppg.whole_model"] = sppg.whole_model_sanitize ? "true" : "false";
  kv["privacy.amplified"] = sppg.privacy.amplified ? "true" : "false";
  {
    std::string grid;
    for (const auto a : sppg.privacy.alpha_grid)
      grid += (grid.empty() ? "" : ";") + num(a);
    kv["privacy.alphas"] = grid;
  }
  kv["rcdr.epochs"] = std::to_string(rcdr.epochs);
  kv["rcdr.batch"] = std::to_string(rcdr.batch_size);
  kv["rcdr.lr"] = num(rcdr.lr);
  kv["rcdr.lambda_a"] = num(rcdr.lambda_a);
  kv["rcdr.lambda_r"] = num(rcdr.lambda_r);
  kv["rcdr.recon_weight"] = num(rcdr.recon_weight);
  kv["rcdr.pred_weight"] = num(rcdr.pred_weight);
  kv["rcdr.neg_ratio"] = std::to_string(rcdr.neg_ratio);
  kv["rcdr.k"] = std::to_string(rcdr.k);
  kv["rcdr.patience"] = std::to_string(rcdr.patience);
  kv["rcdr.zscore_eps"] = num(rcdr.zscore_eps);
  kv["rcdr.id_embeddings"] = rcdr.id_embeddings ? "true" : "false";
  kv["rcdr.zero_source"] = rcdr.zero_source ? "true" : "false";
  {
    std::string ks;
    for (const auto k : eval_ks) ks += (ks.empty() ? "" : ";") + std::to_string(k);
    kv["eval.ks"] = ks;
  }
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string RunConfig::hash() const {
  const std::uint64_t h = fnv1a64(canonical());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

RunConfig from_toml(const FlatToml& toml) {
  RunConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(toml.get_int("seed", 1));
  cfg.src_path = toml.get_string("dataset.src", "");
  cfg.tgt_path = toml.get_string("dataset.tgt", "");
  cfg.binarize_threshold = toml.get_number("dataset.threshold", 3.0);
  cfg.min_interactions = static_cast<std::size_t>(
      toml.get_int("dataset.min_interactions", 5));
  cfg.n_negatives =
      static_cast<std::size_t>(toml.get_int("dataset.negatives", 99));

  cfg.use_synth = toml.get_bool("synth.enabled", toml.has("synth.users"));
  auto& sp = cfg.synth_spec;
  sp.n_users = static_cast<std::size_t>(toml.get_int("synth.users", 300));
  sp.n_items_src =
      static_cast<std::size_t>(toml.get_int("synth.items_src", 200));
  sp.n_items_tgt =
      static_cast<std::size_t>(toml.get_int("synth.items_tgt", 200));
  sp.n_clusters = static_cast<std::size_t>(toml.get_int("synth.clusters", 4));
  sp.positives_per_user_src =
      static_cast<std::size_t>(toml.get_int("synth.pos_src", 20));
  sp.positives_per_user_tgt =
      static_cast<std::size_t>(toml.get_int("synth.pos_tgt", 10));
  sp.noise_flip_prob = toml.get_number("synth.flip", 0.05);
  sp.seed = static_cast<std::uint64_t>(
      toml.get_int("synth.seed", static_cast<std::int64_t>(cfg.seed)));

  auto& sg = cfg.sppg;
  sg.epochs = static_cast<std::size_t>(toml.get_int("sppg.epochs", 100));
  sg.batch_size = static_cast<std::size_t>(toml.get_int("sppg.batch", 128));
  sg.lr = toml.get_number("sppg.lr", 0.01);
  sg.tau = toml.get_number("sppg.tau", 2.0);
  sg.critic_steps_per_gen =
      static_cast<std::size_t>(toml.get_int("sppg.critic_steps", 1));
  sg.noise_dim = static_cast<std::size_t>(toml.get_int("sppg.noise_dim", 0));
  sg.k = static_cast<std::size_t>(toml.get_int("sppg.k", 200));
  sg.privacy.sigma_p = toml.get_number("sppg.sigma_p", 0.0);
  sg.privacy.clip_B = toml.get_number("sppg.clip", 1.0);
  sg.privacy.delta = toml.get_number("sppg.delta", 1e-5);
  sg.privacy.alpha_grid =
      toml.get_array("privacy.alphas", {1.5, 2, 3, 4, 8, 16, 32, 64});
  sg.privacy.amplified = toml.get_bool("privacy.amplified", false);
  sg.whole_model_sanitize = toml.get_bool("sppg.whole_model", false);
  sg.seed = cfg.seed;

  auto& rc = cfg.rcdr;
  rc.epochs = static_cast<std::size_t>(toml.get_int("rcdr.epochs", 100));
  rc.batch_size = static_cast<std::size_t>(toml.get_int("rcdr.batch", 128));
  rc.lr = toml.get_number("rcdr.lr", 0.01);
  rc.lambda_a = toml.get_number("rcdr.lambda_a", 1.0);
  rc.lambda_r = toml.get_number("rcdr.lambda_r", 0.5);
  rc.recon_weight = toml.get_number("rcdr.recon_weight", 1.0);
  rc.pred_weight = toml.get_number("rcdr.pred_weight", 1.0);
  rc.neg_ratio = static_cast<std::size_t>(toml.get_int("rcdr.neg_ratio", 4));
  rc.k = static_cast<std::size_t>(toml.get_int("rcdr.k", 200));
  rc.patience = static_cast<std::size_t>(toml.get_int("rcdr.patience", 10));
  rc.zscore_eps = toml.get_number("rcdr.zscore_eps", 1e-5);
  rc.id_embeddings = toml.get_bool("rcdr.id_embeddings", false);
  rc.zero_source = toml.get_bool("rcdr.zero_source", false);
  rc.seed = cfg.seed;

  const auto ks = toml.get_array("eval.ks", {5, 10});
  cfg.eval_ks.clear();
  for (const auto k : ks) cfg.eval_ks.push_back(static_cast<int>(k));
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return from_toml(FlatToml::parse_file(path));
}

}  // namespace ppgencdr::config
