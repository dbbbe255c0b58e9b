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
#include <unordered_map>
#include <vector>

#include "ppgencdr/rng.hpp"

namespace ppgencdr::dataio {

struct RatingRow {
  std::string user;
  std::string item;
  double rating = 0.0;
};

/// Deduplicated raw rating log. For repeated (user, item) pairs the last
/// occurrence wins, mirroring log-replay semantics.
struct RatingTable {
  std::vector<RatingRow> rows;
  std::size_t duplicates_dropped = 0;
  std::size_t parse_errors = 0;
};

/// Implicit-feedback matrix with dense user/item indices. Adjacency lists are
/// kept sorted by item index.
struct BinaryRatingMatrix {
  std::size_t n_users = 0;
  std::size_t n_items = 0;
  std::vector<std::vector<std::uint32_t>> user_items;  // sorted per user
  std::vector<std::string> user_keys;
  std::vector<std::string> item_keys;

  std::size_t n_entries() const {
    std::size_t n = 0;
    for (const auto& v : user_items) n += v.size();
    return n;
  }
  bool has(std::size_t u, std::uint32_t i) const;
  /// Interaction counts per item index.
  std::vector<std::size_t> item_degrees() const;
  /// Dense 0/1 row for user u.
  std::vector<double> dense_row(std::size_t u) const;
  /// Dense 0/1 column for item i (length n_users).
  std::vector<double> dense_col(std::uint32_t i) const;
};

/// Two domains over an identical, identically indexed user set.
struct DomainPair {
  BinaryRatingMatrix source;
  BinaryRatingMatrix target;
};

struct HeldOut {
  std::uint32_t item = 0;
  std::vector<std::uint32_t> negatives;  // disjoint from user's positives
};

/// Leave-one-out split over the target domain: one validation and one test
/// positive per user, 99 sampled unrated negatives each; the remaining
/// positives form train_target.
struct EvalSplit {
  std::vector<HeldOut> val;
  std::vector<HeldOut> test;
  BinaryRatingMatrix train_target;
  std::size_t n_negatives = 99;
};

RatingTable load_ratings(const std::string& path);

BinaryRatingMatrix binarize(const RatingTable& table, double threshold = 3.0);

// Removes users and items below the interaction floor, re-running until a
// fixed point: dropping an item can push a user below the floor and vice
// versa. Surviving indices are re-densified in original order.
BinaryRatingMatrix filter_min_interactions(const BinaryRatingMatrix& m,
                                           std::size_t min_interactions = 5);

// Intersects the user sets by key and re-filters both sides, iterating to a
// fixed point; the result shares one user indexing (source order).
DomainPair align_domains(const BinaryRatingMatrix& src,
                         const BinaryRatingMatrix& tgt,
                         std::size_t min_interactions = 5);

EvalSplit make_eval_split(const DomainPair& pair, std::size_t n_negatives,
                          std::uint64_t seed);

/// Writes interactions_src.csv, interactions_tgt.csv, eval_split.csv.
void save_snapshot(const std::string& dir, const DomainPair& pair,
                   const EvalSplit& split);

struct Snapshot {
  DomainPair pair;
  EvalSplit split;
};

Snapshot load_snapshot(const std::string& dir);

}  // namespace ppgencdr::dataio
