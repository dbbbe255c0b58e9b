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

#include "ppgencdr/synth.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "ppgencdr/errors.hpp"
#include "ppgencdr/rng.hpp"

namespace ppgencdr::synth {

void SynthSpec::validate() const {
  if (n_users == 0 || n_clusters == 0)
    throw ConfigError("synth: users and clusters must be > 0");
  if (positives_per_user_src < 5 || positives_per_user_tgt < 5)
    throw ConfigError("synth: need at least 5 positives per user per domain");
  if (noise_flip_prob < 0.0 || noise_flip_prob > 1.0)
    throw ConfigError("synth: flip probability must be in [0,1]");
  // Every cluster block must be able to hold a user's in-block positives,
  // and the out-of-block pool must cover the flips.
  const std::size_t block_src = n_items_src / n_clusters;
  const std::size_t block_tgt = n_items_tgt / n_clusters;
  if (block_src < positives_per_user_src || block_tgt < positives_per_user_tgt)
    throw ConfigError("synth: item blocks too small for requested positives");
  if (n_clusters > 1 &&
      (n_items_src - block_src < positives_per_user_src ||
       n_items_tgt - block_tgt < positives_per_user_tgt))
    throw ConfigError("synth: out-of-block pools too small");
}

namespace {

// Draws `count` distinct items, each taken from the user's own block with
// probability 1 - flip and from outside it otherwise.
std::vector<std::uint32_t> draw_items(std::size_t n_items, std::size_t lo,
                                      std::size_t hi, std::size_t count,
                                      double flip, Rng& rng) {
  std::set<std::uint32_t> chosen;
  while (chosen.size() < count) {
    const bool inside = n_items == hi - lo || rng.uniform01() >= flip;
    std::uint32_t item;
    if (inside) {
      item = static_cast<std::uint32_t>(lo + rng.uniform_int(hi - lo));
    } else {
      item = static_cast<std::uint32_t>(rng.uniform_int(n_items - (hi - lo)));
      if (item >= lo) item += static_cast<std::uint32_t>(hi - lo);
    }
    chosen.insert(item);
  }
  return {chosen.begin(), chosen.end()};
}

dataio::BinaryRatingMatrix make_domain(const SynthSpec& spec,
                                       std::size_t n_items,
                                       std::size_t positives, Rng& rng,
                                       const std::string& item_prefix) {
  dataio::BinaryRatingMatrix m;
  m.n_users = spec.n_users;
  m.n_items = n_items;
  const std::size_t block = n_items / spec.n_clusters;
  m.user_items.resize(spec.n_users);
  for (std::size_t u = 0; u < spec.n_users; ++u) {
    const std::size_t cluster = u % spec.n_clusters;
    const std::size_t lo = cluster * block;
    // The last cluster absorbs the remainder items.
    const std::size_t hi =
        cluster + 1 == spec.n_clusters ? n_items : lo + block;
    m.user_items[u] = draw_items(n_items, lo, hi, positives,
                                 spec.noise_flip_prob, rng);
    m.user_keys.push_back("u" + std::to_string(u));
  }
  for (std::size_t i = 0; i < n_items; ++i)
    m.item_keys.push_back(item_prefix + std::to_string(i));
  return m;
}

}  // namespace

dataio::DomainPair generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  SeedStream seeds(spec.seed);
  Rng rng_src = seeds.stream("synth/source");
  Rng rng_tgt = seeds.stream("synth/target");
  dataio::DomainPair pair;
  pair.source = make_domain(spec, spec.n_items_src,
                            spec.positives_per_user_src, rng_src, "s");
  pair.target = make_domain(spec, spec.n_items_tgt,
                            spec.positives_per_user_tgt, rng_tgt, "t");
  return pair;
}

}  // namespace ppgencdr::synth
