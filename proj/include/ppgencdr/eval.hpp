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
#include <vector>

namespace ppgencdr::eval {

struct MetricValues {
  double hr = 0.0;
  double ndcg = 0.0;
  double mrr = 0.0;
};

struct MetricsReport {
  std::map<int, MetricValues> at_k;  // keyed by cutoff K
  std::size_t n_users = 0;
};

// 1-based rank of the positive among the candidates. Ties are broken by
// ascending item id: an equal-scored candidate with a smaller id outranks the
// positive.
std::size_t rank_position(const std::vector<double>& scores,
                          const std::vector<std::uint32_t>& item_ids,
                          std::size_t positive_index);

/// HR@K, NDCG@K (single-relevant convention 1/log2(rank+1)), MRR@K.
MetricsReport metrics_from_ranks(const std::vector<std::size_t>& ranks,
                                 const std::vector<int>& ks = {5, 10});

}  // namespace ppgencdr::eval
