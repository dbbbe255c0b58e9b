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

#include "ppgencdr/dataio.hpp"

namespace ppgencdr::synth {

// Cluster-structured two-domain dataset: users are assigned to latent
// clusters round-robin, each cluster owns a disjoint item block per domain,
// and positives land inside the user's own blocks except for a flip fraction.
// The shared clusters are what makes source knowledge transferable.
struct SynthSpec {
  std::size_t n_users = 300;
  std::size_t n_items_src = 200;
  std::size_t n_items_tgt = 200;
  std::size_t n_clusters = 4;
  std::size_t positives_per_user_src = 20;
  std::size_t positives_per_user_tgt = 10;
  double noise_flip_prob = 0.05;
  std::uint64_t seed = 1;

  void validate() const;
};

dataio::DomainPair generate_synthetic(const SynthSpec& spec);

}  // namespace ppgencdr::synth
