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

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace unilink {

using Real = double;
using Index = std::int64_t;

// Embeddings are stored row-major so that a node's vector is contiguous.
using DenseMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<Real, Eigen::RowMajor, Index>;
using Triplet = Eigen::Triplet<Real, Index>;

// Every failure raised by the library carries a stable category so that
// callers (the CLI, the grid search) can react without parsing messages.
enum class ErrorKind {
  kInvalidArgument,
  kOutOfRange,
  kSelfLoop,
  kBipartiteViolation,
  kDimensionMismatch,
  kQuotaUnreachable,
  kDivergence,
  kLimitExceeded,
  kParse,
  kIo,
  kEmpty,
  kUnknownModel,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kOutOfRange: return "out_of_range";
    case ErrorKind::kSelfLoop: return "self_loop";
    case ErrorKind::kBipartiteViolation: return "bipartite_violation";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kQuotaUnreachable: return "quota_unreachable";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kLimitExceeded: return "limit_exceeded";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kEmpty: return "empty";
    case ErrorKind::kUnknownModel: return "unknown_model";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when an iterate stops being finite.
class DivergenceError : public Error {
 public:
  DivergenceError(Index step, const std::string& what)
      : Error(ErrorKind::kDivergence, what + " (step " + std::to_string(step) + ")"), step_(step) {}

  Index step() const noexcept { return step_; }

 private:
  Index step_;
};

// Numerically stable log(sigmoid(z)) = -softplus(-z).
inline Real log_sigmoid(Real z) {
  if (z >= 0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

inline Real sigmoid(Real z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const Real e = std::exp(z);
  return e / (1.0 + e);
}

inline bool all_finite(const DenseMatrix& m) { return m.allFinite(); }

}  // namespace unilink
