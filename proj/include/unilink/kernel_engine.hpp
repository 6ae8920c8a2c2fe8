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

// Forward-propagation form of one full-batch gradient step:
//
//   X' = (c1 I + c2 P [K+ - lambda K-] P) X,      P = P_{a1,b1}(A~)
//   K+ = S_A .* (c3 P_{a2,b2}(A~) + (1 - c3) A)
//   K- = S_B .* (c3 B~ + (1 - c3) B)
//   S_B = sigmoid(Z Z^T),  S_A = 1 - S_B,  Z = P X
//
// The kernel H is applied as a chain of sparse products; the dense form is
// only built on request for inspection.
//
// Score matrices are symmetric, so only the symmetric part of a mask can
// influence a gradient step. Row-normalized masks are therefore symmetrized
// ((M + M^T) / 2) before they enter K+ and K-; for symmetric masks this is
// a no-op.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "unilink/graph_core.hpp"
#include "unilink/negative_sampling.hpp"
#include "unilink/objectives.hpp"

namespace unilink {

inline constexpr Index kDefaultDenseLimit = 500;

struct KernelConfig {
  ModelKind model = ModelKind::kMF;
  Real c1 = 1.0;
  Real c2 = 0.0;
  int c3 = 0;
  int a1 = 0;
  int b1 = 0;
  int a2 = 0;
  int b2 = 0;
  NormScheme pos_norm = NormScheme::kNone;
  NormScheme neg_norm = NormScheme::kNone;
  Real lambda = 1.0;

  bool operator==(const KernelConfig&) const = default;

  void validate() const {
    if (c3 != 0 && c3 != 1) throw Error(ErrorKind::kInvalidArgument, "c3 must be 0 or 1");
    if (a1 < 0 || a2 < 0 || a1 > b1 || a2 > b2) {
      throw Error(ErrorKind::kInvalidArgument, "orders must satisfy 0 <= a1 <= b1 and 0 <= a2 <= b2");
    }
    // P X on the left of the scores pairs with P^T on the way back, which is
    // only P itself for symmetric bases.
    if (b1 > 0 && pos_norm == NormScheme::kRow) {
      throw Error(ErrorKind::kInvalidArgument, "outer propagation (b1 > 0) requires a symmetric normalization");
    }
  }
};

struct NormOverrides {
  std::optional<NormScheme> pos;
  std::optional<NormScheme> neg;
};

// Built-in correspondence for the four supported models.
inline KernelConfig model_config(ModelKind model, Real alpha, Real beta, Real lambda = 1.0, int window = 1,
                                 int layers = 0, NormOverrides overrides = {}) {
  KernelConfig c;
  c.model = model;
  c.c1 = 1.0 - alpha * beta;
  c.c2 = alpha;
  c.lambda = lambda;
  switch (model) {
    case ModelKind::kMF:
      break;
    case ModelKind::kLINE:
      // Negatives are drawn from a degree^0.75 distribution instead of being
      // reweighted, so B~ is plain B.
      c.c3 = 1;
      c.a2 = c.b2 = 1;
      c.pos_norm = NormScheme::kRow;
      break;
    case ModelKind::kDeepWalk:
      if (window < 1) throw Error(ErrorKind::kInvalidArgument, "window must be >= 1");
      c.c3 = 1;
      c.a2 = 1;
      c.b2 = window;
      c.pos_norm = NormScheme::kRow;
      c.neg_norm = NormScheme::kRow;
      break;
    case ModelKind::kLightGCN:
      if (layers < 0) throw Error(ErrorKind::kInvalidArgument, "layers must be >= 0");
      c.b1 = layers;
      c.pos_norm = NormScheme::kSymmetric;
      break;
  }
  if (overrides.pos) c.pos_norm = *overrides.pos;
  if (overrides.neg) c.neg_norm = *overrides.neg;
  c.validate();
  return c;
}

// S_A and S_B on the union of the positive and negative mask supports.
struct ScorePair {
  SparseMatrix s_a;
  SparseMatrix s_b;
};

struct LinkKernels {
  SparseMatrix k_plus;
  SparseMatrix k_minus;
};

// Norms after each of the four substeps of one step, plus the input norm.
struct SubstepTrace {
  Real input_norm = 0;
  std::vector<std::pair<int, Real>> entries;
};

inline SparseMatrix support_union(const SparseMatrix& a, const SparseMatrix& b) {
  SparseMatrix pattern = a.cwiseAbs() + b.cwiseAbs();
  for (Index i = 0; i < pattern.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(pattern, i); it; ++it) it.valueRef() = 1.0;
  }
  pattern.makeCompressed();
  return pattern;
}

// sigmoid(<z_i, z_j>) on the nonzeros of `support`.
inline ScorePair score_matrices(const DenseMatrix& z, const SparseMatrix& support) {
  if (z.rows() != support.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "score support size differs from representation rows");
  }
  ScorePair out{support, support};
  for (Index i = 0; i < support.outerSize(); ++i) {
    SparseMatrix::InnerIterator a(out.s_a, i);
    SparseMatrix::InnerIterator b(out.s_b, i);
    for (; b; ++a, ++b) {
      const Real s = sigmoid(z.row(i).dot(z.row(b.col())));
      b.valueRef() = s;
      a.valueRef() = 1.0 - s;
    }
  }
  return out;
}

class PropagationKernel {
 public:
  PropagationKernel(const Graph& graph, const NegativeSet& negatives, KernelConfig config,
                    MaskOptions mask_options = {})
      : config_(config), num_nodes_(graph.num_nodes()) {
    config_.validate();
    if (negatives.num_nodes != graph.num_nodes()) {
      throw Error(ErrorKind::kDimensionMismatch, "negative set and graph disagree on node count");
    }
    const NormalizedAdjacency pos_base = normalize(graph, config_.pos_norm);
    outer_ = ProximityOperator(pos_base, config_.a1, config_.b1, mask_options.max_order);
    if (config_.c3 == 1) {
      const ProximityOperator inner(pos_base, config_.a2, config_.b2, mask_options.max_order);
      positive_ = symmetric_part(inner.materialize(mask_options.effective_tolerance(graph.num_nodes())));
      negative_ = symmetric_part(normalize_negatives(negatives, config_.neg_norm).matrix);
    } else {
      positive_ = graph.adjacency();
      negative_ = negatives.adjacency;
    }
    support_ = support_union(positive_, negative_);
  }

  const KernelConfig& config() const noexcept { return config_; }
  const SparseMatrix& positive_mask() const noexcept { return positive_; }
  const SparseMatrix& negative_mask() const noexcept { return negative_; }
  const SparseMatrix& support() const noexcept { return support_; }
  const ProximityOperator& outer() const noexcept { return outer_; }

  DenseMatrix propagate(const DenseMatrix& x) const { return unilink::propagate(outer_, x); }

  ScorePair scores(const DenseMatrix& z) const { return score_matrices(z, support_); }

  LinkKernels link_kernels(const ScorePair& scores) const {
    if (scores.s_a.rows() != num_nodes_ || scores.s_b.rows() != num_nodes_) {
      throw Error(ErrorKind::kDimensionMismatch, "score matrices do not match the graph size");
    }
    LinkKernels k{scores.s_a.cwiseProduct(positive_), scores.s_b.cwiseProduct(negative_)};
    if (k.k_plus.nonZeros() != positive_.nonZeros() || k.k_minus.nonZeros() != negative_.nonZeros()) {
      throw Error(ErrorKind::kInvalidArgument, "score support does not cover the link masks");
    }
    return k;
  }

  // K+ - lambda K-.
  SparseMatrix middle(const LinkKernels& k) const {
    SparseMatrix m = k.k_plus - config_.lambda * k.k_minus;
    m.makeCompressed();
    return m;
  }

  // H X with the given scores.
  DenseMatrix apply(const DenseMatrix& x, const ScorePair& scores, SubstepTrace* trace = nullptr) const {
    return apply_from(x, propagate(x), scores, trace);
  }

  // One step with scores taken at the current iterate.
  DenseMatrix step(const DenseMatrix& x, SubstepTrace* trace = nullptr) const {
    const DenseMatrix z = propagate(x);
    return apply_from(x, z, scores(z), trace);
  }

  // Explicit H for the given scores; limited to small graphs.
  DenseMatrix materialize(const ScorePair& scores, Index dense_limit = kDefaultDenseLimit) const {
    if (num_nodes_ > dense_limit) {
      throw Error(ErrorKind::kLimitExceeded, "dense kernel requested for " + std::to_string(num_nodes_) +
                                                 " nodes (limit " + std::to_string(dense_limit) + ")");
    }
    const Eigen::MatrixXd p = outer_.materialize().toDense();
    const Eigen::MatrixXd m = middle(link_kernels(scores)).toDense();
    Eigen::MatrixXd h = config_.c2 * (p * m * p);
    h.diagonal().array() += config_.c1;
    return h;
  }

 private:
  DenseMatrix apply_from(const DenseMatrix& x, const DenseMatrix& z, const ScorePair& scores,
                         SubstepTrace* trace) const {
    const SparseMatrix m = middle(link_kernels(scores));
    DenseMatrix y = m * z;                 // (2)
    DenseMatrix back = outer_.apply(y);    // (3)
    DenseMatrix out = config_.c1 * x + config_.c2 * back;  // (4)
    if (trace) {
      trace->input_norm = x.norm();
      trace->entries = {{1, z.norm()}, {2, y.norm()}, {3, back.norm()}, {4, out.norm()}};
    }
    if (!all_finite(out)) throw DivergenceError(0, "kernel step produced non-finite entries");
    return out;
  }

  KernelConfig config_;
  Index num_nodes_ = 0;
  ProximityOperator outer_;
  SparseMatrix positive_;
  SparseMatrix negative_;
  SparseMatrix support_;
};

inline LinkKernels link_kernels(const ScorePair& scores, const Graph& graph, const NegativeSet& negatives,
                                const KernelConfig& config) {
  return PropagationKernel(graph, negatives, config).link_kernels(scores);
}

inline DenseMatrix kernel_step(const DenseMatrix& x, const KernelConfig& config, const Graph& graph,
                               const NegativeSet& negatives, SubstepTrace* trace = nullptr) {
  return PropagationKernel(graph, negatives, config).step(x, trace);
}

inline DenseMatrix materialize_kernel(const KernelConfig& config, const ScorePair& scores, const Graph& graph,
                                      const NegativeSet& negatives, Index dense_limit = kDefaultDenseLimit) {
  return PropagationKernel(graph, negatives, config).materialize(scores, dense_limit);
}

struct SignViolation {
  Index row = 0;
  Index col = 0;
  Real value = 0;
  bool positive_link = false;
};

struct SignReport {
  bool balanced = true;
  Index positive_checked = 0;
  Index negative_checked = 0;
  std::vector<SignViolation> violations;
};

// With P = I the off-diagonal of H at a link equals c2 times the middle
// factor there: friends pull (>= 0) and sampled enemies push (<= 0).
inline SignReport sign_structure(const DenseMatrix& h, const Graph& graph, const NegativeSet& negatives) {
  if (h.rows() != graph.num_nodes() || h.cols() != graph.num_nodes()) {
    throw Error(ErrorKind::kDimensionMismatch, "kernel size differs from graph size");
  }
  SignReport report;
  auto check = [&](const std::vector<Edge>& pairs, bool positive) {
    for (const Edge& e : pairs) {
      for (auto [i, j] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
        const Real v = h(i, j);
        (positive ? report.positive_checked : report.negative_checked)++;
        if (positive ? v < 0 : v > 0) report.violations.push_back({i, j, v, positive});
      }
    }
  };
  check(graph.edges(), true);
  check(negatives.pairs, false);
  report.balanced = report.violations.empty();
  return report;
}

}  // namespace unilink
