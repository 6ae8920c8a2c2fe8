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

// Seeded instance generators shared by the test binaries.

#pragma once

#include <random>
#include <vector>

#include "unilink/oracle.hpp"
#include "unilink/unilink.hpp"

namespace unilink::testing {

// Erdos-Renyi graph; a spanning path is added when `connected` is set.
inline Graph random_graph(Index n, double p, std::uint64_t seed, bool connected = true) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<NodePair> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  if (connected) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k = 1; k < order.size(); ++k) edges.emplace_back(order[k - 1], order[k]);
  }
  return build_graph(n, edges);
}

// Bipartite graph in which every user has at least one item.
inline Graph random_bipartite(Index users, Index items, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::uniform_int_distribution<Index> pick(0, items - 1);
  std::vector<NodePair> edges;
  for (Index u = 0; u < users; ++u) {
    edges.emplace_back(u, users + pick(rng));
    for (Index i = 0; i < items; ++i) {
      if (coin(rng)) edges.emplace_back(u, users + i);
    }
  }
  return build_graph(users + items, edges, Partition{users, items});
}

inline DenseMatrix random_matrix(Index rows, Index cols, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  DenseMatrix x(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) x(i, j) = normal(rng);
  }
  return x;
}

inline NegativeSet uniform_negatives(const Graph& g, std::uint64_t seed) {
  SamplingOptions o;
  o.seed = seed;
  return sample_negatives(g, o);
}

// Up to |E| distinct non-edges drawn uniformly from all non-adjacent pairs.
// Independent of the sampler so loss tests can run on dense small graphs.
inline NegativeSet random_negatives(const Graph& g, std::uint64_t seed) {
  std::vector<Edge> free;
  for (Index i = 0; i < g.num_nodes(); ++i) {
    for (Index j = i + 1; j < g.num_nodes(); ++j) {
      if (!g.has_edge(i, j) && (!g.bipartite() || (g.is_user(i) && g.is_item(j)))) free.push_back({i, j});
    }
  }
  std::shuffle(free.begin(), free.end(), std::mt19937_64(seed));
  free.resize(std::min<std::size_t>(free.size(), static_cast<std::size_t>(g.num_edges())));
  return negatives_from_pairs(g.num_nodes(), free);
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline TrainConfig model_train_config(ModelKind model, double alpha, double beta, Index dim, int window = 1,
                                      int layers = 0) {
  TrainConfig c;
  c.model = model;
  c.alpha = alpha;
  c.beta = beta;
  c.dim = dim;
  c.window = window;
  c.layers = layers;
  return c;
}

}  // namespace unilink::testing
