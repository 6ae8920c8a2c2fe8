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

// Matrix-form BCE objectives for MF, LINE, DeepWalk and LightGCN together
// with their exact full-batch gradients and the plain gradient-descent step.
//
// Every model scores pairs by inner products of a (possibly propagated)
// representation Z = P X and differs only in P and in the positive and
// negative masks that weight the log-likelihood terms:
//
//   MF        P = I                        M+ = A                M- = B
//   LINE      P = I                        M+ = D_A^-1 A         M- = B
//   DeepWalk  P = I                        M+ = P_{1,w}(D_A^-1 A) M- = D_B^-1 B
//   LightGCN  P = P_{0,K}(D^-1/2 A D^-1/2) M+ = A                M- = B
//
// Scores are only evaluated on mask nonzeros; the dense Gram matrix is
// never formed.

#include <string>

#include "unilink/graph_core.hpp"
#include "unilink/negative_sampling.hpp"

namespace unilink {

enum class ModelKind { kMF, kLINE, kDeepWalk, kLightGCN };

inline std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::kMF: return "mf";
    case ModelKind::kLINE: return "line";
    case ModelKind::kDeepWalk: return "deepwalk";
    case ModelKind::kLightGCN: return "lightgcn";
  }
  return "mf";
}

inline ModelKind parse_model(const std::string& s) {
  if (s == "mf" || s == "MF") return ModelKind::kMF;
  if (s == "line" || s == "LINE") return ModelKind::kLINE;
  if (s == "deepwalk" || s == "DeepWalk") return ModelKind::kDeepWalk;
  if (s == "lightgcn" || s == "LightGCN") return ModelKind::kLightGCN;
  throw Error(ErrorKind::kUnknownModel, "unknown model '" + s + "'");
}

struct LossParams {
  ModelKind model = ModelKind::kMF;
  Real lambda = 1.0;
  Real beta = 0.0;
  int window = 1;  // DeepWalk
  int layers = 0;  // LightGCN

  void validate() const {
    if (lambda < 0) throw Error(ErrorKind::kInvalidArgument, "lambda must be >= 0");
    if (beta < 0) throw Error(ErrorKind::kInvalidArgument, "beta must be >= 0");
    if (model == ModelKind::kDeepWalk && window < 1) throw Error(ErrorKind::kInvalidArgument, "window must be >= 1");
    if (model == ModelKind::kLightGCN && layers < 0) throw Error(ErrorKind::kInvalidArgument, "layers must be >= 0");
  }
};

// Random-walk masks fill in quickly. Below `exact_below_nodes` they are kept
// exact; above it entries smaller than `drop_tolerance` are pruned.
struct MaskOptions {
  Real drop_tolerance = 1e-8;
  Index exact_below_nodes = 1000;
  int max_order = kDefaultMaxProximityOrder;

  Real effective_tolerance(Index num_nodes) const { return num_nodes < exact_below_nodes ? 0.0 : drop_tolerance; }
};

struct Embedding {
  DenseMatrix values;
  Index step = 0;
};

namespace detail {

inline void check_mask_shapes(const DenseMatrix& x, const SparseMatrix& pos, const SparseMatrix& neg) {
  if (pos.rows() != pos.cols() || neg.rows() != neg.cols() || pos.rows() != neg.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "positive and negative masks must be square and of equal size");
  }
  if (x.rows() != pos.rows()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "embedding rows " + std::to_string(x.rows()) + " != mask size " + std::to_string(pos.rows()));
  }
}

// Data term of the BCE loss and its gradient with respect to z, where the
// pair scores are <z_i, z_j>.
inline Real masked_log_likelihood(const DenseMatrix& z, const SparseMatrix& pos, const SparseMatrix& neg,
                                  Real lambda) {
  Real pos_sum = 0;
  for (Index i = 0; i < pos.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(pos, i); it; ++it) {
      pos_sum += it.value() * log_sigmoid(z.row(i).dot(z.row(it.col())));
    }
  }
  Real neg_sum = 0;
  for (Index i = 0; i < neg.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(neg, i); it; ++it) {
      neg_sum += it.value() * log_sigmoid(-z.row(i).dot(z.row(it.col())));
    }
  }
  return -0.5 * (pos_sum + lambda * neg_sum);
}

inline DenseMatrix masked_gradient(const DenseMatrix& z, const SparseMatrix& pos, const SparseMatrix& neg,
                                   Real lambda) {
  DenseMatrix g = DenseMatrix::Zero(z.rows(), z.cols());
  // d/ds [-1/2 w log sigma(s)] = -1/2 w (1 - sigma(s)); s_ij = <z_i, z_j>
  // contributes to both rows i and j, so asymmetric masks are handled.
  for (Index i = 0; i < pos.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(pos, i); it; ++it) {
      const Index j = it.col();
      const Real coeff = -0.5 * it.value() * (1.0 - sigmoid(z.row(i).dot(z.row(j))));
      g.row(i) += coeff * z.row(j);
      g.row(j) += coeff * z.row(i);
    }
  }
  for (Index i = 0; i < neg.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(neg, i); it; ++it) {
      const Index j = it.col();
      const Real coeff = 0.5 * lambda * it.value() * sigmoid(z.row(i).dot(z.row(j)));
      g.row(i) += coeff * z.row(j);
      g.row(j) += coeff * z.row(i);
    }
  }
  return g;
}

}  // namespace detail

// L = -1/2 sum_ij [M+_ij log s(<x_i,x_j>) + lambda M-_ij log s(-<x_i,x_j>)] + beta/2 |X|_F^2
inline Real bce_loss(const DenseMatrix& x, const SparseMatrix& positive, const SparseMatrix& negative, Real lambda,
                     Real beta) {
  detail::check_mask_shapes(x, positive, negative);
  return detail::masked_log_likelihood(x, positive, negative, lambda) + 0.5 * beta * x.squaredNorm();
}

// Precomputed masks and propagation for one (model, graph, negatives).
class Objective {
 public:
  Objective(const Graph& graph, const NegativeSet& negatives, LossParams params, MaskOptions mask_options = {})
      : params_(params) {
    params_.validate();
    if (negatives.num_nodes != graph.num_nodes()) {
      throw Error(ErrorKind::kDimensionMismatch, "negative set and graph disagree on node count");
    }
    switch (params_.model) {
      case ModelKind::kMF:
        positive_ = graph.adjacency();
        negative_ = negatives.adjacency;
        break;
      case ModelKind::kLINE:
        positive_ = normalize(graph, NormScheme::kRow).matrix;
        negative_ = negatives.adjacency;
        break;
      case ModelKind::kDeepWalk:
        positive_ = proximity(normalize(graph, NormScheme::kRow), 1, params_.window, mask_options.max_order)
                        .materialize(mask_options.effective_tolerance(graph.num_nodes()));
        negative_ = normalize_negatives(negatives, NormScheme::kRow).matrix;
        break;
      case ModelKind::kLightGCN:
        positive_ = graph.adjacency();
        negative_ = negatives.adjacency;
        propagation_ =
            proximity(normalize(graph, NormScheme::kSymmetric), 0, params_.layers, mask_options.max_order);
        break;
    }
  }

  const LossParams& params() const noexcept { return params_; }
  const SparseMatrix& positive_mask() const noexcept { return positive_; }
  const SparseMatrix& negative_mask() const noexcept { return negative_; }
  const ProximityOperator& propagation() const noexcept { return propagation_; }

  // Representation whose inner products score pairs (X itself unless LightGCN).
  DenseMatrix scoring_embeddings(const DenseMatrix& x) const { return propagate(propagation_, x); }

  Real loss(const DenseMatrix& x) const {
    const DenseMatrix z = scoring_embeddings(x);
    detail::check_mask_shapes(z, positive_, negative_);
    return detail::masked_log_likelihood(z, positive_, negative_, params_.lambda) +
           0.5 * params_.beta * x.squaredNorm();
  }

  // dL/dX = P^T dL/dZ + beta X.
  DenseMatrix gradient(const DenseMatrix& x) const {
    const DenseMatrix z = scoring_embeddings(x);
    detail::check_mask_shapes(z, positive_, negative_);
    DenseMatrix g = propagation_.apply_transpose(detail::masked_gradient(z, positive_, negative_, params_.lambda));
    if (params_.beta != 0) g += params_.beta * x;
    return g;
  }

 private:
  LossParams params_;
  SparseMatrix positive_;
  SparseMatrix negative_;
  ProximityOperator propagation_;
};

inline Real model_loss(const DenseMatrix& x, const Graph& graph, const NegativeSet& negatives,
                       const LossParams& params) {
  return Objective(graph, negatives, params).loss(x);
}

inline DenseMatrix loss_gradient(const DenseMatrix& x, const Graph& graph, const NegativeSet& negatives,
                                 const LossParams& params) {
  return Objective(graph, negatives, params).gradient(x);
}

// X <- X - alpha * gradient.
inline Embedding gd_step(const Embedding& x, const DenseMatrix& gradient, Real alpha) {
  if (alpha < 0) throw Error(ErrorKind::kInvalidArgument, "learning rate must be nonnegative");
  if (gradient.rows() != x.values.rows() || gradient.cols() != x.values.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "gradient shape differs from embedding shape");
  }
  Embedding next{x.values - alpha * gradient, x.step + 1};
  if (!all_finite(next.values)) throw DivergenceError(next.step, "gradient step produced non-finite entries");
  return next;
}

}  // namespace unilink
