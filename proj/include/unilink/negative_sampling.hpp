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

// Sampled negative adjacency B. Sampling happens once, before training, and
// is deterministic for a given seed.

#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "unilink/graph_core.hpp"

namespace unilink {

enum class SamplingStrategy { kUniform, kDegreePower };

inline std::string to_string(SamplingStrategy s) {
  return s == SamplingStrategy::kUniform ? "uniform" : "degree_power";
}

inline SamplingStrategy parse_sampling_strategy(const std::string& s) {
  if (s == "uniform") return SamplingStrategy::kUniform;
  if (s == "degree_power") return SamplingStrategy::kDegreePower;
  throw Error(ErrorKind::kParse, "unknown sampling strategy '" + s + "'");
}

struct SamplingOptions {
  SamplingStrategy strategy = SamplingStrategy::kUniform;
  Real exponent = 0.75;  // degree_power only
  Index ratio = 1;       // negatives per positive edge
  std::uint64_t seed = 0;
  int max_attempts_per_draw = 1000;
};

struct NegativeSet {
  Index num_nodes = 0;
  std::vector<Edge> pairs;  // sorted, u < v
  SparseMatrix adjacency;   // symmetric 0/1
  SamplingOptions options;

  Index num_pairs() const noexcept { return static_cast<Index>(pairs.size()); }
};

class QuotaUnreachableError : public Error {
 public:
  QuotaUnreachableError(Index achieved, Index requested)
      : Error(ErrorKind::kQuotaUnreachable, "sampled " + std::to_string(achieved) + " of " +
                                                std::to_string(requested) + " negative pairs"),
        achieved_(achieved),
        requested_(requested) {}

  Index achieved() const noexcept { return achieved_; }
  Index requested() const noexcept { return requested_; }

 private:
  Index achieved_;
  Index requested_;
};

// weight(v) = degree(v)^exponent, isolated nodes get 0.
inline std::vector<Real> degree_power_weights(const Graph& graph, Real exponent) {
  if (exponent < 0) throw Error(ErrorKind::kInvalidArgument, "exponent must be nonnegative");
  std::vector<Real> w(static_cast<std::size_t>(graph.num_nodes()), 0.0);
  for (Index v = 0; v < graph.num_nodes(); ++v) {
    const Index d = graph.degree(v);
    w[static_cast<std::size_t>(v)] = d == 0 ? 0.0 : std::pow(static_cast<Real>(d), exponent);
  }
  return w;
}

// Draws the free end of a negative pair from the candidate range
// (items for bipartite graphs, all nodes otherwise).
class TargetSampler {
 public:
  TargetSampler(const Graph& graph, SamplingStrategy strategy, Real exponent)
      : first_(graph.first_item()), strategy_(strategy), uniform_(first_, graph.num_nodes() - 1) {
    if (strategy == SamplingStrategy::kDegreePower) {
      const auto all = degree_power_weights(graph, exponent);
      std::vector<Real> range(all.begin() + first_, all.end());
      weighted_ = std::discrete_distribution<Index>(range.begin(), range.end());
    }
  }

  Index first() const noexcept { return first_; }

  template <typename Rng>
  Index draw(Rng& rng) {
    if (strategy_ == SamplingStrategy::kUniform) return uniform_(rng);
    return first_ + weighted_(rng);
  }

 private:
  Index first_;
  SamplingStrategy strategy_;
  std::uniform_int_distribution<Index> uniform_;
  std::discrete_distribution<Index> weighted_;
};

inline NegativeSet negatives_from_pairs(Index num_nodes, std::vector<Edge> pairs, SamplingOptions options = {}) {
  std::sort(pairs.begin(), pairs.end());
  NegativeSet out;
  out.num_nodes = num_nodes;
  out.adjacency = symmetric_adjacency(num_nodes, pairs);
  out.pairs = std::move(pairs);
  out.options = options;
  return out;
}

// For every positive edge, draws `ratio` negative pairs that share an anchor
// with it. Bipartite graphs anchor on the user and draw a non-interacted
// item; general graphs anchor on a random endpoint. Sampling is without
// replacement and rejects observed links.
inline NegativeSet sample_negatives(const Graph& graph, const SamplingOptions& options) {
  if (options.ratio < 1) throw Error(ErrorKind::kInvalidArgument, "ratio must be >= 1");
  const Index n = graph.num_nodes();
  const Index requested = options.ratio * graph.num_edges();

  Index candidates = 0;
  if (auto p = graph.partition()) {
    candidates = p->num_users * p->num_items - graph.num_edges();
  } else {
    candidates = n * (n - 1) / 2 - graph.num_edges();
  }
  if (candidates < requested) throw QuotaUnreachableError(0, requested);

  std::mt19937_64 rng(options.seed);
  std::bernoulli_distribution coin(0.5);
  TargetSampler sampler(graph, options.strategy, options.exponent);

  std::unordered_set<std::uint64_t> drawn;
  drawn.reserve(static_cast<std::size_t>(requested) * 2);
  std::vector<Edge> pairs;
  pairs.reserve(static_cast<std::size_t>(requested));

  for (const Edge& e : graph.edges()) {
    for (Index r = 0; r < options.ratio; ++r) {
      Index anchor = e.u;
      Index other = e.v;
      if (!graph.bipartite() && coin(rng)) std::swap(anchor, other);
      bool placed = false;
      // General graphs fall back to the other endpoint when the first
      // anchor has run out of free partners.
      const int rounds = graph.bipartite() ? 1 : 2;
      for (int round = 0; round < rounds && !placed; ++round, std::swap(anchor, other)) {
        for (int attempt = 0; attempt < options.max_attempts_per_draw && !placed; ++attempt) {
          const Index target = sampler.draw(rng);
          if (target == anchor || graph.has_edge(anchor, target)) continue;
          const Edge pair{std::min(anchor, target), std::max(anchor, target)};
          const auto key = static_cast<std::uint64_t>(pair.u) * static_cast<std::uint64_t>(n) +
                           static_cast<std::uint64_t>(pair.v);
          if (!drawn.insert(key).second) continue;
          pairs.push_back(pair);
          placed = true;
        }
      }
      if (!placed) throw QuotaUnreachableError(static_cast<Index>(pairs.size()), requested);
    }
  }
  return negatives_from_pairs(n, std::move(pairs), options);
}

inline NormalizedAdjacency normalize_negatives(const NegativeSet& negatives, NormScheme scheme) {
  return normalize(negatives.adjacency, scheme);
}

}  // namespace unilink
