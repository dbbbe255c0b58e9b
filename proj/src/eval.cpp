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

#include "ppgencdr/eval.hpp"

#include <cmath>

#include "ppgencdr/errors.hpp"

namespace ppgencdr::eval {

std::size_t rank_position(const std::vector<double>& scores,
                          const std::vector<std::uint32_t>& item_ids,
                          std::size_t positive_index) {
  if (scores.size() != item_ids.size() || positive_index >= scores.size())
    throw DataError("rank_position: malformed candidate list");
  const double pos_score = scores[positive_index];
  const std::uint32_t pos_id = item_ids[positive_index];
  std::size_t rank = 1;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == positive_index) continue;
    if (scores[i] > pos_score ||
        (scores[i] == pos_score && item_ids[i] < pos_id))
      ++rank;
  }
  return rank;
}

MetricsReport metrics_from_ranks(const std::vector<std::size_t>& ranks,
                                 const std::vector<int>& ks) {
  if (ranks.empty()) throw DataError("metrics_from_ranks: no ranks");
  MetricsReport report;
  report.n_users = ranks.size();
  for (const int k : ks) {
    MetricValues m;
    for (const auto rank : ranks) {
      if (rank >= 1 && rank <= static_cast<std::size_t>(k)) {
        m.hr += 1.0;
        m.ndcg += 1.0 / std::log2(static_cast<double>(rank) + 1.0);
        m.mrr += 1.0 / static_cast<double>(rank);
      }
    }
    const auto n = static_cast<double>(ranks.size());
    m.hr /= n;
    m.ndcg /= n;
    m.mrr /= n;
    report.at_k[k] = m;
  }
  return report;
}

}  // namespace ppgencdr::eval
