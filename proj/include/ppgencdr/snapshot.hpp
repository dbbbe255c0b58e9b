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

#include <string>
#include <vector>

#include <json.hpp>

#include "ppgencdr/nn.hpp"
#include "ppgencdr/rcdr.hpp"
#include "ppgencdr/sppg.hpp"

namespace ppgencdr::snapshot {

// Flat tensor container format: magic "PPGC", u32 version, then one record
// per tensor until EOF. Record: u32 name length, name bytes, u32 rank,
// u64 dims, row-major float64 values. Everything little-endian.
struct TensorRecord {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<double> values;
};

void write_tensors(const std::string& path,
                   const std::vector<TensorRecord>& tensors);
std::vector<TensorRecord> read_tensors(const std::string& path);

/// Tensors of one network under "prefix/": emb, w0, b0, w1, b1, ...
std::vector<TensorRecord> params_to_tensors(const std::string& prefix,
                                            const nn::Params& p);
nn::Params params_from_tensors(const nn::NetworkSpec& spec,
                               const std::string& prefix,
                               const std::vector<TensorRecord>& tensors);

nlohmann::json spec_to_json(const nn::NetworkSpec& spec);
nn::NetworkSpec spec_from_json(const nlohmann::json& j);

/// generator.ppgc plus a JSON sidecar carrying the architecture, the final
/// budget, and the training fingerprint.
void save_published_generator(const std::string& path,
                              const sppg::PublishedGenerator& pg);
sppg::PublishedGenerator load_published_generator(const std::string& path);

void save_rcdr_model(const std::string& path, const rcdr::RcdrModel& model);
rcdr::RcdrModel load_rcdr_model(const std::string& path);

}  // namespace ppgencdr::snapshot
