// Copyright 2026 The unilink Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Full-ranking top-K evaluation over all non-interacted items.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "unilink/graph_core.hpp"

namespace unilink {

inline constexpr int kDefaultTopK = 20;

enum class SplitPart { kTrain, kValidation, kTest };

// Per-user item lists (local item indices in [0, num_items), ascending).
struct SplitSet {
  Index num_users = 0;
  Index num_items = 0;
  std::uint64_t seed = 0;
  std::array<Real, 3> ratios{1.0, 0.0, 0.0};
  std::vector<std::vector<Index>> train;
  std::vector<std::vector<Index>> validation;
  std::vector<std::vector<Index>> test;
  std::vector<Index> flagged_users;  // users left without a test item

  const std::vector<std::vector<Index>>& part(SplitPart p) const {
    switch (p) {
      case SplitPart::kTrain: return train;
      case SplitPart::kValidation: return validation;
      case SplitPart::kTest: return test;
    }
    return train;
  }

  Index count(SplitPart p) const {
    Index n = 0;
    for (const auto& items : part(p)) n += static_cast<Index>(items.size());
    return n;
  }

  Graph graph_of(SplitPart p) const {
    std::vector<NodePair> edges;
    const auto& lists = part(p);
    for (Index u = 0; u < num_users; ++u) {
      for (Index i : lists[static_cast<std::size_t>(u)]) edges.emplace_back(u, num_users + i);
    }
    return build_graph(num_users + num_items, edges, Partition{num_users, num_items});
  }

  Graph train_graph() const { return graph_of(SplitPart::kTrain); }
};

// Inner-product scores of `user` against every item; excluded items get -inf.
inline std::vector<Real> score_user(const DenseMatrix& z, Index user, const Graph& train_graph,
                                    std::span<const Index> extra_excluded = {}) {
  const auto& part = train_graph.partition();
  if (!part) throw Error(ErrorKind::kInvalidArgument, "scoring requires a user/item partition");
  if (user < 0 || user >= part->num_users) throw Error(ErrorKind::kOutOfRange, "user id out of range");
  if (z.rows() != train_graph.num_nodes()) {
    throw Error(ErrorKind::kDimensionMismatch, "embedding rows differ from graph size");
  }
  const Index first = part->num_users;
  std::vector<Real> scores(static_cast<std::size_t>(part->num_items));
  const auto items = z.bottomRows(part->num_items);
  Eigen::Matrix<Real, Eigen::Dynamic, 1> s = items * z.row(user).transpose();
  for (Index i = 0; i < part->num_items; ++i) scores[static_cast<std::size_t>(i)] = s[i];
  constexpr Real kMasked = -std::numeric_limits<Real>::infinity();
  for (SparseMatrix::InnerIterator it(train_graph.adjacency(), user); it; ++it) {
    scores[static_cast<std::size_t>(it.col() - first)] = kMasked;
  }
  for (Index i : extra_excluded) scores[static_cast<std::size_t>(i)] = kMasked;
  return scores;
}

struct TopK {
  std::vector<Index> items;
  bool short_list = false;  // fewer than K candidates were available
};

// Highest scores first, ties by ascending index; -inf entries are not candidates.
inline TopK top_k(std::span<const Real> scores, int k) {
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "K must be >= 1");
  std::vector<Index> candidates;
  candidates.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] != -std::numeric_limits<Real>::infinity()) candidates.push_back(static_cast<Index>(i));
  }
  auto better = [&](Index a, Index b) {
    const Real sa = scores[static_cast<std::size_t>(a)];
    const Real sb = scores[static_cast<std::size_t>(b)];
    return sa != sb ? sa > sb : a < b;
  };
  TopK out;
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), candidates.size());
  out.short_list = take < static_cast<std::size_t>(k);
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                    better);
  out.items.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take));
  return out;
}

struct RankingMetrics {
  Real precision = 0;
  Real recall = 0;
  Real ndcg = 0;
};

// Binary-relevance precision, recall and NDCG at K. IDCG covers
// min(K, |test|) ideal hits. `test_items` must be sorted.
inline RankingMetrics metrics_at_k(std::span<const Index> ranked, std::span<const Index> test_items, int k) {
  if (k < 1) throw Error(ErrorKind::kInvalidArgument, "K must be >= 1");
  if (test_items.empty()) throw Error(ErrorKind::kEmpty, "no test items");
  Real hits = 0;
  Real dcg = 0;
  const auto depth = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(k));
  for (std::size_t r = 0; r < depth; ++r) {
    if (std::binary_search(test_items.begin(), test_items.end(), ranked[r])) {
      hits += 1;
      dcg += 1.0 / std::log2(static_cast<Real>(r) + 2.0);
    }
  }
  Real idcg = 0;
  const auto ideal = std::min<std::size_t>(test_items.size(), static_cast<std::size_t>(k));
  for (std::size_t r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(static_cast<Real>(r) + 2.0);
  return {hits / k, hits / static_cast<Real>(test_items.size()), dcg / idcg};
}

struct EvalResult {
  int k = kDefaultTopK;
  Real precision = 0;
  Real recall = 0;
  Real ndcg = 0;
  Index evaluated_users = 0;
  Index skipped_users = 0;
};

// Averages over users with a nonempty target list. Candidates exclude
// training items and, when scoring the test part, validation items.
inline EvalResult evaluate(const DenseMatrix& z, const SplitSet& splits, const Graph& train_graph,
                           int k = kDefaultTopK, SplitPart target = SplitPart::kTest) {
  if (target == SplitPart::kTrain) throw Error(ErrorKind::kInvalidArgument, "cannot evaluate on the train part");
  EvalResult out;
  out.k = k;
  const auto& lists = splits.part(target);
  for (Index u = 0; u < splits.num_users; ++u) {
    const auto& truth = lists[static_cast<std::size_t>(u)];
    if (truth.empty()) {
      ++out.skipped_users;
      continue;
    }
    std::span<const Index> extra;
    if (target == SplitPart::kTest) extra = splits.validation[static_cast<std::size_t>(u)];
    const auto scores = score_user(z, u, train_graph, extra);
    const auto ranked = top_k(scores, k);
    const auto m = metrics_at_k(ranked.items, truth, k);
    out.precision += m.precision;
    out.recall += m.recall;
    out.ndcg += m.ndcg;
    ++out.evaluated_users;
  }
  if (out.evaluated_users == 0) throw Error(ErrorKind::kEmpty, "no evaluable users");
  const auto n = static_cast<Real>(out.evaluated_users);
  out.precision /= n;
  out.recall /= n;
  out.ndcg /= n;
  return out;
}

inline EvalResult evaluate(const DenseMatrix& z, const SplitSet& splits, int k = kDefaultTopK,
                           SplitPart target = SplitPart::kTest) {
  return evaluate(z, splits, splits.train_graph(), k, target);
}

struct EvalSummary {
  int k = kDefaultTopK;
  std::vector<EvalResult> per_seed;
  EvalResult mean;
};

inline EvalSummary aggregate(std::vector<EvalResult> per_seed) {
  if (per_seed.empty()) throw Error(ErrorKind::kEmpty, "no results to aggregate");
  EvalSummary s;
  s.k = per_seed.front().k;
  s.mean.k = s.k;
  for (const auto& r : per_seed) {
    s.mean.precision += r.precision;
    s.mean.recall += r.recall;
    s.mean.ndcg += r.ndcg;
    s.mean.evaluated_users += r.evaluated_users;
    s.mean.skipped_users += r.skipped_users;
  }
  const auto n = static_cast<Real>(per_seed.size());
  s.mean.precision /= n;
  s.mean.recall /= n;
  s.mean.ndcg /= n;
  s.mean.evaluated_users /= static_cast<Index>(per_seed.size());
  s.mean.skipped_users /= static_cast<Index>(per_seed.size());
  s.per_seed = std::move(per_seed);
  return s;
}

}  // namespace unilink
