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

// Graph construction, degree and normalization machinery, and the averaged
// power operator P_{a,b}(M) = (M^a + ... + M^b) / (b - a + 1).

#include <algorithm>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unilink/common.hpp"

namespace unilink {

inline constexpr int kDefaultMaxProximityOrder = 16;

struct Partition {
  Index num_users = 0;
  Index num_items = 0;

  bool operator==(const Partition&) const = default;
};

// Undirected edge with u < v.
struct Edge {
  Index u = 0;
  Index v = 0;

  auto operator<=>(const Edge&) const = default;
};

using NodePair = std::pair<Index, Index>;

// Symmetric sparse adjacency over a single index space. For bipartite
// graphs users occupy [0, num_users) and items [num_users, num_nodes).
class Graph {
 public:
  Graph() = default;

  Index num_nodes() const noexcept { return num_nodes_; }
  Index num_edges() const noexcept { return static_cast<Index>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::optional<Partition>& partition() const noexcept { return partition_; }
  bool bipartite() const noexcept { return partition_.has_value(); }
  const SparseMatrix& adjacency() const noexcept { return adjacency_; }
  const std::vector<Index>& degrees() const noexcept { return degrees_; }
  Index degree(Index v) const { return degrees_.at(static_cast<std::size_t>(v)); }

  bool is_user(Index v) const { return partition_ && v < partition_->num_users; }
  bool is_item(Index v) const { return partition_ && v >= partition_->num_users; }
  Index first_item() const { return partition_ ? partition_->num_users : 0; }

  bool has_edge(Index u, Index v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges_.begin(), edges_.end(), Edge{u, v});
  }

  // Neighbors of v in ascending order.
  std::vector<Index> neighbors(Index v) const {
    std::vector<Index> out;
    for (SparseMatrix::InnerIterator it(adjacency_, v); it; ++it) out.push_back(it.col());
    return out;
  }

  bool operator==(const Graph& other) const {
    return num_nodes_ == other.num_nodes_ && edges_ == other.edges_ && partition_ == other.partition_;
  }

  friend Graph build_graph(Index, std::span<const NodePair>, std::optional<Partition>);

 private:
  Index num_nodes_ = 0;
  std::vector<Edge> edges_;
  std::optional<Partition> partition_;
  SparseMatrix adjacency_;
  std::vector<Index> degrees_;
};

// Symmetric 0/1 adjacency matrix with both (u,v) and (v,u) stored.
inline SparseMatrix symmetric_adjacency(Index num_nodes, std::span<const Edge> edges) {
  std::vector<Triplet> triplets;
  triplets.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    triplets.emplace_back(e.u, e.v, 1.0);
    triplets.emplace_back(e.v, e.u, 1.0);
  }
  SparseMatrix m(num_nodes, num_nodes);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

// Builds a deduplicated, symmetrized graph with canonically sorted edges.
inline Graph build_graph(Index num_nodes, std::span<const NodePair> edge_list,
                         std::optional<Partition> partition = std::nullopt) {
  if (num_nodes < 0) throw Error(ErrorKind::kInvalidArgument, "negative node count");
  if (partition) {
    if (partition->num_users < 0 || partition->num_items < 0 ||
        partition->num_users + partition->num_items != num_nodes) {
      throw Error(ErrorKind::kInvalidArgument,
                  "partition sizes " + std::to_string(partition->num_users) + "+" +
                      std::to_string(partition->num_items) + " do not sum to " + std::to_string(num_nodes));
    }
  }
  Graph g;
  g.num_nodes_ = num_nodes;
  g.partition_ = partition;
  g.edges_.reserve(edge_list.size());
  for (std::size_t k = 0; k < edge_list.size(); ++k) {
    auto [u, v] = edge_list[k];
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes) {
      throw Error(ErrorKind::kOutOfRange, "edge #" + std::to_string(k) + " (" + std::to_string(u) + "," +
                                              std::to_string(v) + ") outside [0," + std::to_string(num_nodes) + ")");
    }
    if (u == v) throw Error(ErrorKind::kSelfLoop, "edge #" + std::to_string(k) + " at node " + std::to_string(u));
    if (u > v) std::swap(u, v);
    if (partition && !(u < partition->num_users && v >= partition->num_users)) {
      throw Error(ErrorKind::kBipartiteViolation,
                  "edge #" + std::to_string(k) + " (" + std::to_string(u) + "," + std::to_string(v) +
                      ") does not join a user to an item");
    }
    g.edges_.push_back({u, v});
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());

  g.adjacency_ = symmetric_adjacency(num_nodes, g.edges_);
  g.degrees_.assign(static_cast<std::size_t>(num_nodes), 0);
  for (const Edge& e : g.edges_) {
    ++g.degrees_[static_cast<std::size_t>(e.u)];
    ++g.degrees_[static_cast<std::size_t>(e.v)];
  }
  return g;
}

inline Graph build_graph(Index num_nodes, std::initializer_list<NodePair> edges,
                         std::optional<Partition> partition = std::nullopt) {
  return build_graph(num_nodes, std::span<const NodePair>(edges.begin(), edges.size()), partition);
}

enum class NormScheme { kNone, kRow, kSymmetric };

inline std::string to_string(NormScheme s) {
  switch (s) {
    case NormScheme::kNone: return "none";
    case NormScheme::kRow: return "row";
    case NormScheme::kSymmetric: return "symmetric";
  }
  return "none";
}

inline NormScheme parse_norm_scheme(const std::string& s) {
  if (s == "none") return NormScheme::kNone;
  if (s == "row") return NormScheme::kRow;
  if (s == "symmetric" || s == "sym") return NormScheme::kSymmetric;
  throw Error(ErrorKind::kParse, "unknown normalization scheme '" + s + "'");
}

struct NormalizedAdjacency {
  NormScheme scheme = NormScheme::kNone;
  SparseMatrix matrix;

  // Row normalization of a symmetric matrix is not symmetric.
  bool symmetric() const noexcept { return scheme != NormScheme::kRow; }
};

// Normalizes any symmetric nonnegative adjacency. A zero degree inverts to 0.
inline NormalizedAdjacency normalize(const SparseMatrix& adjacency, NormScheme scheme) {
  NormalizedAdjacency out{scheme, adjacency};
  if (scheme == NormScheme::kNone) return out;

  Eigen::Matrix<Real, Eigen::Dynamic, 1> degree = Eigen::Matrix<Real, Eigen::Dynamic, 1>::Zero(adjacency.rows());
  for (Index r = 0; r < adjacency.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(adjacency, r); it; ++it) degree[r] += it.value();
  }
  Eigen::Matrix<Real, Eigen::Dynamic, 1> scale(adjacency.rows());
  for (Index r = 0; r < degree.size(); ++r) {
    if (degree[r] <= 0) {
      scale[r] = 0;
    } else {
      scale[r] = scheme == NormScheme::kRow ? 1.0 / degree[r] : 1.0 / std::sqrt(degree[r]);
    }
  }
  for (Index r = 0; r < out.matrix.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(out.matrix, r); it; ++it) {
      it.valueRef() *= scheme == NormScheme::kRow ? scale[r] : scale[r] * scale[it.col()];
    }
  }
  return out;
}

inline NormalizedAdjacency normalize(const Graph& graph, NormScheme scheme) {
  return normalize(graph.adjacency(), scheme);
}

// Averaged power operator over a normalized adjacency. Applied lazily it
// costs b sparse products per column block; it can also be materialized.
class ProximityOperator {
 public:
  ProximityOperator() : ProximityOperator(NormalizedAdjacency{}, 0, 0) {}

  ProximityOperator(NormalizedAdjacency base, int a, int b, int max_order = kDefaultMaxProximityOrder)
      : base_(std::make_shared<const NormalizedAdjacency>(std::move(base))), a_(a), b_(b) {
    if (a < 0 || b < 0) throw Error(ErrorKind::kInvalidArgument, "proximity orders must be nonnegative");
    if (a > b) {
      throw Error(ErrorKind::kInvalidArgument,
                  "proximity order a=" + std::to_string(a) + " exceeds b=" + std::to_string(b));
    }
    if (b > max_order) {
      throw Error(ErrorKind::kLimitExceeded,
                  "proximity order b=" + std::to_string(b) + " over maximum " + std::to_string(max_order));
    }
    if (!base_->symmetric() && b_ > 0) {
      transpose_ = std::make_shared<const SparseMatrix>(SparseMatrix(base_->matrix.transpose()));
    }
  }

  int a() const noexcept { return a_; }
  int b() const noexcept { return b_; }
  bool identity() const noexcept { return a_ == 0 && b_ == 0; }
  const NormalizedAdjacency& base() const noexcept { return *base_; }
  bool symmetric() const noexcept { return base_->symmetric(); }

  DenseMatrix apply(const DenseMatrix& x) const { return apply_with(base_->matrix, x); }

  // Applies P^T; identical to apply() for symmetric bases.
  DenseMatrix apply_transpose(const DenseMatrix& x) const {
    return transpose_ ? apply_with(*transpose_, x) : apply(x);
  }

  // Explicit sparse P. Entries with magnitude below drop_tolerance are pruned.
  SparseMatrix materialize(Real drop_tolerance = 0.0) const {
    const Index n = base_->matrix.rows();
    SparseMatrix identity(n, n);
    identity.setIdentity();
    SparseMatrix sum(n, n);
    SparseMatrix power = identity;
    if (a_ == 0) sum = identity;
    for (int r = 1; r <= b_; ++r) {
      power = (base_->matrix * power).pruned();
      if (r >= a_) sum += power;
    }
    sum *= 1.0 / static_cast<Real>(b_ - a_ + 1);
    if (drop_tolerance > 0) sum.prune(drop_tolerance, 1.0);
    sum.makeCompressed();
    return sum;
  }

 private:
  DenseMatrix apply_with(const SparseMatrix& m, const DenseMatrix& x) const {
    if (identity()) return x;
    if (x.rows() != m.cols()) {
      throw Error(ErrorKind::kDimensionMismatch, "operator is " + std::to_string(m.rows()) + "x" +
                                                     std::to_string(m.cols()) + ", input has " +
                                                     std::to_string(x.rows()) + " rows");
    }
    DenseMatrix power = x;
    DenseMatrix sum = a_ == 0 ? x : DenseMatrix::Zero(x.rows(), x.cols());
    for (int r = 1; r <= b_; ++r) {
      power = m * power;
      if (r >= a_) sum += power;
    }
    sum /= static_cast<Real>(b_ - a_ + 1);
    return sum;
  }

  std::shared_ptr<const NormalizedAdjacency> base_;
  std::shared_ptr<const SparseMatrix> transpose_;
  int a_ = 0;
  int b_ = 0;
};

inline ProximityOperator proximity(const NormalizedAdjacency& base, int a, int b,
                                   int max_order = kDefaultMaxProximityOrder) {
  return ProximityOperator(base, a, b, max_order);
}

inline DenseMatrix propagate(const ProximityOperator& op, const DenseMatrix& x) {
  const Index n = op.base().matrix.rows();
  if (n > 0 && x.rows() != n) {
    throw Error(ErrorKind::kDimensionMismatch, "embedding has " + std::to_string(x.rows()) +
                                                   " rows, graph has " + std::to_string(op.base().matrix.rows()));
  }
  return op.apply(x);
}

// Symmetric part (M + M^T) / 2, pattern-preserving.
inline SparseMatrix symmetric_part(const SparseMatrix& m) {
  SparseMatrix t = m.transpose();
  SparseMatrix s = (m + t) * 0.5;
  s.makeCompressed();
  return s;
}

}  // namespace unilink
