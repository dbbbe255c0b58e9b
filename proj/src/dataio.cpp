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

#include "ppgencdr/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "ppgencdr/errors.hpp"

namespace ppgencdr::dataio {

namespace {

std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

bool parse_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  const auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(trim(cur));
  return fields;
}

}  // namespace

bool BinaryRatingMatrix::has(std::size_t u, std::uint32_t i) const {
  const auto& v = user_items[u];
  return std::binary_search(v.begin(), v.end(), i);
}

std::vector<std::size_t> BinaryRatingMatrix::item_degrees() const {
  std::vector<std::size_t> deg(n_items, 0);
  for (const auto& v : user_items)
    for (const auto i : v) ++deg[i];
  return deg;
}

std::vector<double> BinaryRatingMatrix::dense_row(std::size_t u) const {
  std::vector<double> r(n_items, 0.0);
  for (const auto i : user_items[u]) r[i] = 1.0;
  return r;
}

std::vector<double> BinaryRatingMatrix::dense_col(std::uint32_t i) const {
  std::vector<double> c(n_users, 0.0);
  for (std::size_t u = 0; u < n_users; ++u)
    if (has(u, i)) c[u] = 1.0;
  return c;
}

RatingTable load_ratings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ratings file: " + path);

  RatingTable table;
  std::unordered_map<std::string, std::size_t> seen;  // "user\0item" -> row
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    double rating = 0.0;
    const bool ok =
        fields.size() >= 3 && !fields[0].empty() && !fields[1].empty() &&
        parse_double(fields[2], rating);
    if (!ok) {
      // A non-numeric rating on the first line is a header, not bad data.
      if (!first) ++table.parse_errors;
      first = false;
      continue;
    }
    first = false;
    std::string key = fields[0];
    key.push_back('\0');
    key += fields[1];
    const auto it = seen.find(key);
    if (it != seen.end()) {
      table.rows[it->second].rating = rating;  // last occurrence wins
      ++table.duplicates_dropped;
    } else {
      seen.emplace(std::move(key), table.rows.size());
      table.rows.push_back({fields[0], fields[1], rating});
    }
  }
  if (table.rows.empty()) throw DataError("zero valid rows in " + path);
  return table;
}

BinaryRatingMatrix binarize(const RatingTable& table, double threshold) {
  if (threshold <= 0.0) throw ConfigError("binarize threshold must be > 0");
  BinaryRatingMatrix m;
  std::unordered_map<std::string, std::uint32_t> umap;
  std::unordered_map<std::string, std::uint32_t> imap;
  for (const auto& row : table.rows) {
    if (row.rating < threshold) continue;  // negatives dropped
    auto [uit, unew] = umap.emplace(row.user, umap.size());
    if (unew) {
      m.user_keys.push_back(row.user);
      m.user_items.emplace_back();
    }
    auto [iit, inew] = imap.emplace(row.item, imap.size());
    if (inew) m.item_keys.push_back(row.item);
    m.user_items[uit->second].push_back(iit->second);
  }
  m.n_users = m.user_keys.size();
  m.n_items = m.item_keys.size();
  for (auto& v : m.user_items) std::sort(v.begin(), v.end());
  return m;
}

namespace {

// Rebuilds a matrix keeping only flagged users/items, densifying indices in
// original order.
BinaryRatingMatrix subset(const BinaryRatingMatrix& m,
                          const std::vector<bool>& keep_user,
                          const std::vector<bool>& keep_item) {
  BinaryRatingMatrix out;
  std::vector<std::uint32_t> new_item(m.n_items, 0);
  for (std::size_t i = 0; i < m.n_items; ++i) {
    if (keep_item[i]) {
      new_item[i] = static_cast<std::uint32_t>(out.item_keys.size());
      out.item_keys.push_back(m.item_keys[i]);
    }
  }
  for (std::size_t u = 0; u < m.n_users; ++u) {
    if (!keep_user[u]) continue;
    out.user_keys.push_back(m.user_keys[u]);
    std::vector<std::uint32_t> items;
    for (const auto i : m.user_items[u])
      if (keep_item[i]) items.push_back(new_item[i]);
    out.user_items.push_back(std::move(items));
  }
  out.n_users = out.user_keys.size();
  out.n_items = out.item_keys.size();
  return out;
}

}  // namespace

BinaryRatingMatrix filter_min_interactions(const BinaryRatingMatrix& m,
                                           std::size_t min_interactions) {
  BinaryRatingMatrix cur = m;
  for (;;) {
    std::vector<bool> keep_user(cur.n_users, true);
    std::vector<bool> keep_item(cur.n_items, true);
    bool changed = false;
    const auto ideg = cur.item_degrees();
    for (std::size_t i = 0; i < cur.n_items; ++i) {
      if (ideg[i] < min_interactions) {
        keep_item[i] = false;
        changed = true;
      }
    }
    for (std::size_t u = 0; u < cur.n_users; ++u) {
      if (cur.user_items[u].size() < min_interactions) {
        keep_user[u] = false;
        changed = true;
      }
    }
    if (!changed) return cur;
    cur = subset(cur, keep_user, keep_item);
    if (cur.n_users == 0 || cur.n_items == 0)
      throw DataError("filtering removed all users/items");
  }
}

DomainPair align_domains(const BinaryRatingMatrix& src,
                         const BinaryRatingMatrix& tgt,
                         std::size_t min_interactions) {
  if (src.n_users == 0 || tgt.n_users == 0)
    throw DataError("align_domains: empty input matrix");

  BinaryRatingMatrix s = src;
  BinaryRatingMatrix t = tgt;
  for (;;) {
    std::unordered_set<std::string> tset(t.user_keys.begin(),
                                         t.user_keys.end());
    std::vector<bool> keep_s(s.n_users, false);
    bool s_changed = false;
    for (std::size_t u = 0; u < s.n_users; ++u) {
      keep_s[u] = tset.count(s.user_keys[u]) > 0;
      s_changed |= !keep_s[u];
    }
    std::unordered_set<std::string> sset(s.user_keys.begin(),
                                         s.user_keys.end());
    std::vector<bool> keep_t(t.n_users, false);
    bool t_changed = false;
    for (std::size_t u = 0; u < t.n_users; ++u) {
      keep_t[u] = sset.count(t.user_keys[u]) > 0;
      t_changed |= !keep_t[u];
    }
    if (s_changed) {
      s = subset(s, keep_s, std::vector<bool>(s.n_items, true));
      if (s.n_users == 0) throw DataError("align_domains: no shared users");
    }
    if (t_changed) {
      t = subset(t, keep_t, std::vector<bool>(t.n_items, true));
      if (t.n_users == 0) throw DataError("align_domains: no shared users");
    }
    const auto fs = filter_min_interactions(s, min_interactions);
    const auto ft = filter_min_interactions(t, min_interactions);
    const bool stable = fs.user_keys == s.user_keys &&
                        ft.user_keys == t.user_keys && !s_changed && !t_changed;
    s = fs;
    t = ft;
    if (stable && s.user_keys.size() == t.user_keys.size()) break;
  }

  // Reorder target rows to match the source user indexing exactly.
  std::unordered_map<std::string, std::size_t> tpos;
  for (std::size_t u = 0; u < t.n_users; ++u) tpos.emplace(t.user_keys[u], u);
  BinaryRatingMatrix t2;
  t2.n_users = s.n_users;
  t2.n_items = t.n_items;
  t2.item_keys = t.item_keys;
  t2.user_keys = s.user_keys;
  t2.user_items.resize(s.n_users);
  for (std::size_t u = 0; u < s.n_users; ++u)
    t2.user_items[u] = t.user_items[tpos.at(s.user_keys[u])];
  return DomainPair{std::move(s), std::move(t2)};
}

EvalSplit make_eval_split(const DomainPair& pair, std::size_t n_negatives,
                          std::uint64_t seed) {
  const auto& tgt = pair.target;
  EvalSplit split;
  split.n_negatives = n_negatives;
  split.val.resize(tgt.n_users);
  split.test.resize(tgt.n_users);
  split.train_target = tgt;

  Rng rng = SeedStream(seed).stream("eval-split");
  for (std::size_t u = 0; u < tgt.n_users; ++u) {
    const auto& pos = tgt.user_items[u];
    if (pos.size() < 5)
      throw DataError("user " + tgt.user_keys[u] +
                      " has fewer than 5 target positives");
    const std::size_t a = rng.uniform_int(pos.size());
    std::size_t b = rng.uniform_int(pos.size() - 1);
    if (b >= a) ++b;
    split.val[u].item = pos[a];
    split.test[u].item = pos[b];

    if (tgt.n_items - pos.size() < n_negatives)
      throw DataError("user " + tgt.user_keys[u] +
                      " has too few unrated items for negative sampling");
    for (auto* held : {&split.val[u], &split.test[u]}) {
      std::unordered_set<std::uint32_t> used;
      while (held->negatives.size() < n_negatives) {
        const auto cand =
            static_cast<std::uint32_t>(rng.uniform_int(tgt.n_items));
        if (tgt.has(u, cand) || used.count(cand)) continue;
        used.insert(cand);
        held->negatives.push_back(cand);
      }
    }

    auto& train = split.train_target.user_items[u];
    train.erase(std::remove_if(train.begin(), train.end(),
                               [&](std::uint32_t i) {
                                 return i == split.val[u].item ||
                                        i == split.test[u].item;
                               }),
                train.end());
  }
  return split;
}

namespace {

void write_interactions(const std::string& path, const BinaryRatingMatrix& m) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << "user,item,user_key,item_key\n";
  for (std::size_t u = 0; u < m.n_users; ++u)
    for (const auto i : m.user_items[u])
      out << u << ',' << i << ',' << m.user_keys[u] << ',' << m.item_keys[i]
          << '\n';
}

BinaryRatingMatrix read_interactions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  BinaryRatingMatrix m;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 4) throw DataError("bad interactions row: " + line);
    const auto u = static_cast<std::size_t>(std::stoull(f[0]));
    const auto i = static_cast<std::uint32_t>(std::stoul(f[1]));
    if (u >= m.n_users) {
      m.n_users = u + 1;
      m.user_items.resize(m.n_users);
      m.user_keys.resize(m.n_users);
    }
    if (i >= m.n_items) {
      m.n_items = i + 1;
      m.item_keys.resize(m.n_items);
    }
    m.user_items[u].push_back(i);
    m.user_keys[u] = f[2];
    m.item_keys[i] = f[3];
  }
  for (auto& v : m.user_items) std::sort(v.begin(), v.end());
  if (m.n_users == 0) throw DataError("empty interactions file: " + path);
  return m;
}

}  // namespace

void save_snapshot(const std::string& dir, const DomainPair& pair,
                   const EvalSplit& split) {
  std::filesystem::create_directories(dir);
  write_interactions(dir + "/interactions_src.csv", pair.source);
  write_interactions(dir + "/interactions_tgt.csv", pair.target);

  std::ofstream out(dir + "/eval_split.csv");
  if (!out) throw DataError("cannot write eval_split.csv");
  out << "user,role,item";
  for (std::size_t k = 1; k <= split.n_negatives; ++k) out << ",neg_" << k;
  out << '\n';
  const auto emit = [&](std::size_t u, const char* role, const HeldOut& h) {
    out << u << ',' << role << ',' << h.item;
    for (const auto n : h.negatives) out << ',' << n;
    out << '\n';
  };
  for (std::size_t u = 0; u < split.val.size(); ++u) {
    emit(u, "val", split.val[u]);
    emit(u, "test", split.test[u]);
  }
}

Snapshot load_snapshot(const std::string& dir) {
  Snapshot snap;
  snap.pair.source = read_interactions(dir + "/interactions_src.csv");
  snap.pair.target = read_interactions(dir + "/interactions_tgt.csv");
  if (snap.pair.source.n_users != snap.pair.target.n_users)
    throw DataError("snapshot domains disagree on user count");

  std::ifstream in(dir + "/eval_split.csv");
  if (!in) throw DataError("cannot open eval_split.csv");
  auto& split = snap.split;
  split.val.resize(snap.pair.target.n_users);
  split.test.resize(snap.pair.target.n_users);
  std::string line;
  std::getline(in, line);  // header
  std::size_t n_neg = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() < 4) throw DataError("bad eval_split row: " + line);
    const auto u = static_cast<std::size_t>(std::stoull(f[0]));
    if (u >= split.val.size()) throw DataError("eval_split user out of range");
    HeldOut h;
    h.item = static_cast<std::uint32_t>(std::stoul(f[2]));
    for (std::size_t k = 3; k < f.size(); ++k)
      h.negatives.push_back(static_cast<std::uint32_t>(std::stoul(f[k])));
    n_neg = h.negatives.size();
    if (f[1] == "val")
      split.val[u] = std::move(h);
    else if (f[1] == "test")
      split.test[u] = std::move(h);
    else
      throw DataError("unknown eval_split role: " + f[1]);
  }
  split.n_negatives = n_neg;

  split.train_target = snap.pair.target;
  for (std::size_t u = 0; u < split.train_target.n_users; ++u) {
    auto& train = split.train_target.user_items[u];
    train.erase(std::remove_if(train.begin(), train.end(),
                               [&](std::uint32_t i) {
                                 return i == split.val[u].item ||
                                        i == split.test[u].item;
                               }),
                train.end());
  }
  return snap;
}

}  // namespace ppgencdr::dataio
