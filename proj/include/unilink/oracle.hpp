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

// Brute-force references for tests. Everything here is plain dense loops on
// std::vector storage and deliberately reuses none of the sparse main-path
// algebra: normalization, power sums, scores, losses and kernels are all
// recomputed from the raw 0/1 adjacency. Only plain data types (Edge,
// KernelConfig, DenseMatrix) cross the boundary.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "unilink/kernel_engine.hpp"

namespace unilink::oracle {

inline constexpr Index kDenseLimit = 500;

struct Dense {
  Index rows = 0;
  Index cols = 0;
  std::vector<double> v;

  static Dense zeros(Index r, Index c) { return {r, c, std::vector<double>(static_cast<std::size_t>(r * c), 0.0)}; }
  static Dense identity(Index n) {
    Dense d = zeros(n, n);
    for (Index i = 0; i < n; ++i) d(i, i) = 1.0;
    return d;
  }

  double& operator()(Index i, Index j) { return v[static_cast<std::size_t>(i * cols + j)]; }
  double operator()(Index i, Index j) const { return v[static_cast<std::size_t>(i * cols + j)]; }
};

inline void check_limit(Index n) {
  if (n > kDenseLimit) {
    throw Error(ErrorKind::kLimitExceeded,
                "oracle limited to " + std::to_string(kDenseLimit) + " nodes, got " + std::to_string(n));
  }
}

inline Dense from_pairs(Index n, const std::vector<Edge>& pairs) {
  check_limit(n);
  Dense d = Dense::zeros(n, n);
  for (const Edge& e : pairs) {
    d(e.u, e.v) = 1.0;
    d(e.v, e.u) = 1.0;
  }
  return d;
}

inline Dense from_matrix(const DenseMatrix& m) {
  Dense d = Dense::zeros(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) d(i, j) = m(i, j);
  return d;
}

inline DenseMatrix to_matrix(const Dense& d) {
  DenseMatrix m(d.rows, d.cols);
  for (Index i = 0; i < d.rows; ++i)
    for (Index j = 0; j < d.cols; ++j) m(i, j) = d(i, j);
  return m;
}

inline Dense multiply(const Dense& a, const Dense& b) {
  Dense c = Dense::zeros(a.rows, b.cols);
  for (Index i = 0; i < a.rows; ++i)
    for (Index k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (Index j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline Dense transpose(const Dense& a) {
  Dense t = Dense::zeros(a.cols, a.rows);
  for (Index i = 0; i < a.rows; ++i)
    for (Index j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

inline Dense combine(double s, const Dense& a, double t, const Dense& b) {
  Dense c = a;
  for (std::size_t k = 0; k < c.v.size(); ++k) c.v[k] = s * a.v[k] + t * b.v[k];
  return c;
}

inline Dense hadamard(const Dense& a, const Dense& b) {
  Dense c = a;
  for (std::size_t k = 0; k < c.v.size(); ++k) c.v[k] = a.v[k] * b.v[k];
  return c;
}

inline double max_abs_diff(const Dense& a, const Dense& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.v.size(); ++k) m = std::max(m, std::abs(a.v[k] - b.v[k]));
  return m;
}

inline double max_abs(const Dense& a) {
  double m = 0;
  for (double x : a.v) m = std::max(m, std::abs(x));
  return m;
}

// Same conventions as the main path: 1/0 is taken as 0.
inline Dense dense_normalize(const Dense& a, NormScheme scheme) {
  if (scheme == NormScheme::kNone) return a;
  std::vector<double> deg(static_cast<std::size_t>(a.rows), 0.0);
  for (Index i = 0; i < a.rows; ++i)
    for (Index j = 0; j < a.cols; ++j) deg[static_cast<std::size_t>(i)] += a(i, j);
  Dense out = a;
  for (Index i = 0; i < a.rows; ++i)
    for (Index j = 0; j < a.cols; ++j) {
      const double di = deg[static_cast<std::size_t>(i)];
      const double dj = deg[static_cast<std::size_t>(j)];
      if (scheme == NormScheme::kRow) {
        out(i, j) = di > 0 ? a(i, j) / di : 0.0;
      } else {
        out(i, j) = (di > 0 && dj > 0) ? a(i, j) / std::sqrt(di * dj) : 0.0;
      }
    }
  return out;
}

// (M^a + ... + M^b) / (b - a + 1) by repeated dense multiplication.
inline Dense dense_power_sum(const Dense& m, int a, int b) {
  Dense power = Dense::identity(m.rows);
  Dense sum = Dense::zeros(m.rows, m.cols);
  for (int r = 0; r <= b; ++r) {
    if (r > 0) power = multiply(m, power);
    if (r >= a) sum = combine(1.0, sum, 1.0, power);
  }
  for (double& x : sum.v) x /= static_cast<double>(b - a + 1);
  return sum;
}

inline Dense symmetrize(const Dense& m) { return combine(0.5, m, 0.5, transpose(m)); }

inline double oracle_sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 / (1 + e^-z)) written out per sign to stay finite.
inline double oracle_log_sigmoid(double z) {
  return z > 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z));
}

inline double dot_rows(const Dense& x, Index i, Index j) {
  double s = 0;
  for (Index k = 0; k < x.cols; ++k) s += x(i, k) * x(j, k);
  return s;
}

// The literal double sum over nodes and their positive/negative neighbors.
inline double brute_force_loss(const Dense& x, const Dense& pos, const Dense& neg, double lambda, double beta,
                               const Dense* regularized = nullptr) {
  check_limit(x.rows);
  double total = 0;
  for (Index v = 0; v < x.rows; ++v) {
    double pos_sum = 0;
    double neg_sum = 0;
    for (Index i = 0; i < x.rows; ++i) {
      if (pos(v, i) != 0.0) pos_sum += pos(v, i) * oracle_log_sigmoid(dot_rows(x, v, i));
      if (neg(v, i) != 0.0) neg_sum += neg(v, i) * oracle_log_sigmoid(-dot_rows(x, v, i));
    }
    total += pos_sum + lambda * neg_sum;
  }
  const Dense& r = regularized ? *regularized : x;
  double sq = 0;
  for (double e : r.v) sq += e * e;
  return -0.5 * total + 0.5 * beta * sq;
}

inline Dense finite_difference_gradient(const std::function<double(const Dense&)>& loss, const Dense& x,
                                        double h = 1e-6) {
  if (!(h > 0)) throw Error(ErrorKind::kInvalidArgument, "step must be positive");
  check_limit(x.rows);
  Dense g = Dense::zeros(x.rows, x.cols);
  Dense probe = x;
  for (std::size_t k = 0; k < x.v.size(); ++k) {
    probe.v[k] = x.v[k] + h;
    const double up = loss(probe);
    probe.v[k] = x.v[k] - h;
    const double down = loss(probe);
    probe.v[k] = x.v[k];
    g.v[k] = (up - down) / (2 * h);
  }
  return g;
}

// max|g - g_ref| / max(1, |g_ref|_inf).
inline double relative_error(const Dense& g, const Dense& reference) {
  return max_abs_diff(g, reference) / std::max(1.0, max_abs(reference));
}

struct DenseSnapshot {
  Dense a;
  Dense b;
  Dense x;
};

inline DenseSnapshot make_snapshot(const Graph& graph, const NegativeSet& negatives, const DenseMatrix& x) {
  check_limit(graph.num_nodes());
  return {from_pairs(graph.num_nodes(), graph.edges()), from_pairs(negatives.num_nodes, negatives.pairs),
          from_matrix(x)};
}

struct ModelSpec {
  ModelKind model = ModelKind::kMF;
  double lambda = 1.0;
  double beta = 0.0;
  int window = 1;
  int layers = 0;
};

// Model loss with every mask and propagation formed densely.
inline double dense_model_loss(const Dense& x, const Dense& a, const Dense& b, const ModelSpec& m) {
  switch (m.model) {
    case ModelKind::kMF:
      return brute_force_loss(x, a, b, m.lambda, m.beta);
    case ModelKind::kLINE:
      return brute_force_loss(x, dense_normalize(a, NormScheme::kRow), b, m.lambda, m.beta);
    case ModelKind::kDeepWalk:
      return brute_force_loss(x, dense_power_sum(dense_normalize(a, NormScheme::kRow), 1, m.window),
                              dense_normalize(b, NormScheme::kRow), m.lambda, m.beta);
    case ModelKind::kLightGCN: {
      const Dense p = dense_power_sum(dense_normalize(a, NormScheme::kSymmetric), 0, m.layers);
      const Dense xbar = multiply(p, x);
      return brute_force_loss(xbar, a, b, m.lambda, m.beta, &x);
    }
  }
  return 0;
}

struct DenseKernelParts {
  Dense propagation;  // P_{a1,b1}
  Dense positive;     // mask inside K+
  Dense negative;     // mask inside K-
  Dense s_a;
  Dense s_b;
  Dense h;
};

// H = c1 I + c2 P [S_A .* M+ - lambda S_B .* M-] P with masks symmetrized
// (the scores are symmetric, so only the symmetric part of a mask matters).
inline DenseKernelParts dense_kernel(const Dense& x, const KernelConfig& c, const Dense& a, const Dense& b) {
  check_limit(a.rows);
  const Index n = a.rows;
  DenseKernelParts parts;
  const Dense a_norm = dense_normalize(a, c.pos_norm);
  parts.propagation = dense_power_sum(a_norm, c.a1, c.b1);
  if (c.c3 == 1) {
    parts.positive = symmetrize(dense_power_sum(a_norm, c.a2, c.b2));
    parts.negative = symmetrize(dense_normalize(b, c.neg_norm));
  } else {
    parts.positive = a;
    parts.negative = b;
  }
  const Dense z = multiply(parts.propagation, x);
  parts.s_a = Dense::zeros(n, n);
  parts.s_b = Dense::zeros(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      parts.s_b(i, j) = oracle_sigmoid(dot_rows(z, i, j));
      parts.s_a(i, j) = 1.0 - parts.s_b(i, j);
    }
  const Dense middle =
      combine(1.0, hadamard(parts.s_a, parts.positive), -c.lambda, hadamard(parts.s_b, parts.negative));
  const Dense pmp = multiply(multiply(parts.propagation, middle), parts.propagation);
  parts.h = combine(c.c2, pmp, c.c1, Dense::identity(n));
  return parts;
}

inline Dense dense_kernel_step(const Dense& x, const KernelConfig& c, const Dense& a, const Dense& b) {
  return multiply(dense_kernel(x, c, a, b).h, x);
}

}  // namespace unilink::oracle
