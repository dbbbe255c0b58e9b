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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppgencdr/rcdr.hpp"
#include "ppgencdr/sppg.hpp"
#include "ppgencdr/synth.hpp"

namespace ppgencdr::config {

// Flat TOML subset: `key = value` lines, [section] headers (prefixing keys
// with "section."), #-comments, numbers, booleans, quoted strings, and
// one-level arrays of numbers.
class FlatToml {
 public:
  static FlatToml parse_file(const std::string& path);
  static FlatToml parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  double get_number(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::vector<double> get_array(const std::string& key,
                                const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& raw_value);
  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  std::map<std::string, std::string> values_;  // key -> raw TOML value text
};

struct RunConfig {
  std::uint64_t seed = 1;

  // Dataset: either CSV paths or a synthetic spec.
  std::string src_path;
  std::string tgt_path;
  bool use_synth = false;
  synth::SynthSpec synth_spec;
  double binarize_threshold = 3.0;
  std::size_t min_interactions = 5;
  std::size_t n_negatives = 99;

  sppg::SppgConfig sppg;
  rcdr::RcdrConfig rcdr;
  std::vector<int> eval_ks = {5, 10};

  void validate() const;
  /// Canonical sorted key=value serialization; the config hash is FNV-1a of
  /// this string.
  std::string canonical() const;
  std::string hash() const;
};

RunConfig from_toml(const FlatToml& toml);
RunConfig load_run_config(const std::string& path);

}  // namespace ppgencdr::config
