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

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "ppgencdr/dataio.hpp"
#include "ppgencdr/errors.hpp"

using namespace ppgencdr;
using namespace ppgencdr::dataio;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path =
      (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << content;
  return path;
}

RatingTable table_from(
    const std::vector<std::tuple<std::string, std::string, double>>& rows) {
  RatingTable t;
  for (const auto& [u, i, r] : rows) t.rows.push_back({u, i, r});
  return t;
}

BinaryRatingMatrix matrix_from(
    const std::vector<std::tuple<std::string, std::string>>& entries) {
  RatingTable t;
  for (const auto& [u, i] : entries) t.rows.push_back({u, i, 5.0});
  return binarize(t);
}

}  // namespace

TEST_SUITE_BEGIN("dataio");

TEST_CASE("load_ratings keeps the last duplicate and logs it") {
  const auto path = write_temp("dup.csv", "u1,i1,4.0\nu1,i1,2.0\n");
  const auto table = load_ratings(path);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].rating == 2.0);
  CHECK(table.duplicates_dropped == 1);
  std::remove(path.c_str());
}

TEST_CASE("load_ratings rejects an empty file") {
  const auto path = write_temp("empty.csv", "");
  CHECK_THROWS_AS(load_ratings(path), DataError);
  std::remove(path.c_str());
}

TEST_CASE("load_ratings parses distinct rows, optional header and timestamp") {
  const auto path = write_temp(
      "ok.csv", "user,item,rating\nu1,i1,4.0,12345\nu2,i2,3.5\nu3,i1,1.0\n");
  const auto table = load_ratings(path);
  CHECK(table.rows.size() == 3);
  CHECK(table.parse_errors == 0);
  std::remove(path.c_str());
}

TEST_CASE("load_ratings counts malformed lines") {
  const auto path =
      write_temp("bad.csv", "u1,i1,4.0\nu2,i2,not_a_number\nu3\n");
  const auto table = load_ratings(path);
  CHECK(table.rows.size() == 1);
  CHECK(table.parse_errors == 2);
  std::remove(path.c_str());
}

TEST_CASE("binarize threshold boundary") {
  const auto m = binarize(table_from({{"u", "a", 3.0},
                                      {"u", "b", 2.0},
                                      {"u", "c", 5.0}}));
  REQUIRE(m.n_users == 1);
  CHECK(m.n_items == 2);  // only rated-positive items get indices
  CHECK(m.user_items[0].size() == 2);
}

TEST_CASE("filter removes a user with too few positives") {
  // u1 has 5 positives, u2 has 4; plenty of other users keep items valid.
  std::vector<std::tuple<std::string, std::string>> entries;
  for (int i = 0; i < 5; ++i) {
    entries.emplace_back("u1", "i" + std::to_string(i));
    if (i < 4) entries.emplace_back("u2", "i" + std::to_string(i));
  }
  for (const char* u : {"u3", "u4", "u5", "u6"})
    for (int i = 0; i < 5; ++i)
      entries.emplace_back(u, "i" + std::to_string(i));
  const auto filtered = filter_min_interactions(matrix_from(entries), 5);
  std::set<std::string> users(filtered.user_keys.begin(),
                              filtered.user_keys.end());
  CHECK(users.count("u1") == 1);
  CHECK(users.count("u2") == 0);
  CHECK(filtered.n_items == 5);
}

TEST_CASE("filter cascade reaches the hand-traced fixed point") {
  // With floor 2: i3 and i5 fall first, which drops u2 below the floor,
  // which in turn starves i2. Survivors: {u0,u1} x {i0,i1}, fully dense.
  const auto m = matrix_from({{"u0", "i0"},
                              {"u0", "i1"},
                              {"u0", "i2"},
                              {"u1", "i0"},
                              {"u1", "i1"},
                              {"u1", "i3"},
                              {"u2", "i2"},
                              {"u2", "i5"}});
  const auto f = filter_min_interactions(m, 2);
  CHECK(f.user_keys == std::vector<std::string>{"u0", "u1"});
  CHECK(f.item_keys == std::vector<std::string>{"i0", "i1"});
  CHECK(f.n_entries() == 4);
}

TEST_CASE("filter is idempotent") {
  // Items 5-7 are touched only by the last four users and get filtered; the
  // second pass then has nothing left to remove.
  std::vector<std::tuple<std::string, std::string>> entries;
  for (int u = 0; u < 8; ++u)
    for (int i = 0; i < 8; ++i)
      if (i < 5 || u >= 4)
        entries.emplace_back("u" + std::to_string(u), "i" + std::to_string(i));
  const auto once = filter_min_interactions(matrix_from(entries), 5);
  const auto twice = filter_min_interactions(once, 5);
  CHECK(once.user_keys == twice.user_keys);
  CHECK(once.item_keys == twice.item_keys);
  CHECK(once.user_items == twice.user_items);
}

TEST_CASE("filter can empty the matrix") {
  CHECK_THROWS_AS(filter_min_interactions(matrix_from({{"u", "i"}}), 5),
                  DataError);
}

namespace {

// Fully-crossed block so every surviving user/item clears the floor.
void add_block(std::vector<std::tuple<std::string, std::string>>& entries,
               const std::vector<std::string>& users, const std::string& dom,
               int items) {
  for (const auto& u : users)
    for (int i = 0; i < items; ++i)
      entries.emplace_back(u, dom + std::to_string(i));
}

}  // namespace

TEST_CASE("align keeps only shared users") {
  std::vector<std::tuple<std::string, std::string>> src, tgt;
  add_block(src, {"a", "b", "c", "d", "e"}, "s", 5);
  add_block(tgt, {"b", "c", "d", "e", "f"}, "t", 5);
  const auto pair = align_domains(matrix_from(src), matrix_from(tgt), 4);
  CHECK(pair.source.user_keys == std::vector<std::string>{"b", "c", "d", "e"});
  CHECK(pair.target.user_keys == pair.source.user_keys);
  CHECK(pair.source.n_users == pair.target.n_users);
}

TEST_CASE("align rejects disjoint user sets") {
  std::vector<std::tuple<std::string, std::string>> src, tgt;
  add_block(src, {"a", "b", "c", "d", "e"}, "s", 5);
  add_block(tgt, {"x", "y", "z", "w", "v"}, "t", 5);
  CHECK_THROWS_AS(align_domains(matrix_from(src), matrix_from(tgt), 5),
                  DataError);
}

TEST_CASE("align cascades: intersection starves a user on one side") {
  // Floor 2. b's source positives live on items only b and the dropped user
  // q touch, so removing q drops those items and then b from both sides.
  std::vector<std::tuple<std::string, std::string>> src, tgt;
  add_block(src, {"a", "c"}, "s", 2);
  src.emplace_back("b", "sb0");
  src.emplace_back("b", "sb1");
  src.emplace_back("q", "sb0");
  src.emplace_back("q", "sb1");
  add_block(tgt, {"a", "b", "c"}, "t", 2);
  const auto pair = align_domains(matrix_from(src), matrix_from(tgt), 2);
  CHECK(pair.source.user_keys == std::vector<std::string>{"a", "c"});
  CHECK(pair.target.user_keys == pair.source.user_keys);
  for (std::size_t u = 0; u < pair.source.n_users; ++u) {
    CHECK(pair.source.user_items[u].size() >= 2);
    CHECK(pair.target.user_items[u].size() >= 2);
  }
}

namespace {

// Users with `positives` target positives over a `tgt_items`-wide universe;
// every item in both domains is touched so indices cover the full range.
DomainPair wide_pair(int users, int tgt_items, int positives) {
  std::vector<std::tuple<std::string, std::string>> src, tgt;
  for (int u = 0; u < users; ++u)
    for (int i = 0; i < positives; ++i) {
      src.emplace_back("u" + std::to_string(u), "s" + std::to_string(i));
      tgt.emplace_back("u" + std::to_string(u),
                       "t" + std::to_string((u * positives + i) % tgt_items));
    }
  for (int i = 0; i < tgt_items; ++i)
    tgt.emplace_back("u0_pad_owner", "t" + std::to_string(i));
  DomainPair pair;
  pair.source = matrix_from(src);
  pair.target = matrix_from(tgt);
  // The pad owner exists in the target only; drop it to equalize user sets.
  std::vector<bool> keep(pair.target.n_users, true);
  if (pair.target.user_keys.back() == "u0_pad_owner") {
    pair.target.user_keys.pop_back();
    pair.target.user_items.pop_back();
    pair.target.n_users -= 1;
  }
  return pair;
}

}  // namespace

TEST_CASE("eval split holds out two items and 99 fresh negatives") {
  const auto pair = wide_pair(8, 150, 6);
  const auto split = make_eval_split(pair, 99, 42);
  for (std::size_t u = 0; u < pair.target.n_users; ++u) {
    const auto& train = split.train_target.user_items[u];
    const auto& full = pair.target.user_items[u];
    CHECK(train.size() == full.size() - 2);
    CHECK(split.val[u].item != split.test[u].item);
    for (const auto* held : {&split.val[u], &split.test[u]}) {
      CHECK(split.train_target.has(u, held->item) == false);
      CHECK(pair.target.has(u, held->item));
      REQUIRE(held->negatives.size() == 99);
      std::set<std::uint32_t> negs(held->negatives.begin(),
                                   held->negatives.end());
      CHECK(negs.size() == 99);  // without replacement
      for (const auto n : negs) CHECK_FALSE(pair.target.has(u, n));
    }
  }
}

TEST_CASE("eval split is reproducible from the seed") {
  const auto pair = wide_pair(6, 140, 5);
  const auto a = make_eval_split(pair, 99, 7);
  const auto b = make_eval_split(pair, 99, 7);
  for (std::size_t u = 0; u < pair.target.n_users; ++u) {
    CHECK(a.val[u].item == b.val[u].item);
    CHECK(a.test[u].item == b.test[u].item);
    CHECK(a.val[u].negatives == b.val[u].negatives);
    CHECK(a.test[u].negatives == b.test[u].negatives);
  }
}

TEST_CASE("eval split rejects a too-small unrated pool") {
  const auto pair = wide_pair(6, 50, 5);  // only 45 unrated per user
  CHECK_THROWS_AS(make_eval_split(pair, 99, 1), DataError);
}

TEST_CASE("snapshot round-trips pair and split") {
  const auto pair = wide_pair(6, 130, 6);
  const auto split = make_eval_split(pair, 99, 3);

  const auto dir =
      (std::filesystem::temp_directory_path() / "ppgc_snap_test").string();
  save_snapshot(dir, pair, split);
  const auto snap = load_snapshot(dir);
  CHECK(snap.pair.source.user_items == pair.source.user_items);
  CHECK(snap.pair.target.user_items == pair.target.user_items);
  CHECK(snap.pair.source.item_keys == pair.source.item_keys);
  for (std::size_t u = 0; u < pair.target.n_users; ++u) {
    CHECK(snap.split.val[u].item == split.val[u].item);
    CHECK(snap.split.test[u].negatives == split.test[u].negatives);
    CHECK(snap.split.train_target.user_items[u] ==
          split.train_target.user_items[u]);
  }
  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
