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

// Full-batch training along the gradient path, the kernel path, or both in
// lockstep, with early stopping and a hyperparameter grid search.

#include <algorithm>
#include <atomic>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "unilink/diagnostics.hpp"
#include "unilink/evaluation.hpp"
#include "unilink/kernel_engine.hpp"
#include "unilink/objectives.hpp"

namespace unilink {

enum class TrainPath { kGradient, kKernel, kBoth };

inline std::string to_string(TrainPath p) {
  switch (p) {
    case TrainPath::kGradient: return "gradient";
    case TrainPath::kKernel: return "kernel";
    case TrainPath::kBoth: return "both";
  }
  return "gradient";
}

inline TrainPath parse_train_path(const std::string& s) {
  if (s == "gradient") return TrainPath::kGradient;
  if (s == "kernel") return TrainPath::kKernel;
  if (s == "both") return TrainPath::kBoth;
  throw Error(ErrorKind::kParse, "unknown training path '" + s + "'");
}

struct TrainConfig {
  ModelKind model = ModelKind::kMF;
  Real alpha = 1e-2;
  Real beta = 0.0;
  Real lambda = 1.0;
  int window = 1;
  int layers = 0;
  Index dim = 64;
  int max_epochs = 500;
  int patience = 10;
  TrainPath path = TrainPath::kGradient;
  Real init_scale = 0.01;
  std::uint64_t init_seed = 0;
  int eval_every = 1;
  int metric_k = kDefaultTopK;
  bool trace_substeps = false;
  bool resample_negatives = false;
  MaskOptions masks;

  void validate() const {
    if (!(alpha > 0)) throw Error(ErrorKind::kInvalidArgument, "alpha must be > 0");
    if (patience < 1) throw Error(ErrorKind::kInvalidArgument, "patience must be >= 1");
    if (dim < 1) throw Error(ErrorKind::kInvalidArgument, "dim must be >= 1");
    if (max_epochs < 0) throw Error(ErrorKind::kInvalidArgument, "max_epochs must be >= 0");
    if (eval_every < 1) throw Error(ErrorKind::kInvalidArgument, "eval_every must be >= 1");
    if (!(init_scale > 0)) throw Error(ErrorKind::kInvalidArgument, "init scale must be > 0");
    loss_params().validate();
  }

  LossParams loss_params() const { return {model, lambda, beta, window, layers}; }
  KernelConfig kernel_config() const { return model_config(model, alpha, beta, lambda, window, layers); }
};

struct EpochRecord {
  Index epoch = 0;
  Real loss = 0;
  Real mean_k_plus = 0;
  Real frob_norm = 0;
  std::optional<Real> validation;
  std::optional<std::array<Real, 4>> substeps;
  std::optional<bool> substeps_contract;
  std::optional<Real> path_divergence;  // path = both only
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  Index stop_epoch = 0;
  std::string stop_reason;
  Index best_epoch = 0;
  std::optional<Real> best_validation;
  Real max_path_divergence = 0;

  std::vector<TrajectoryRecord> trajectories() const {
    std::vector<TrajectoryRecord> out;
    out.reserve(epochs.size());
    for (const auto& e : epochs) out.push_back({e.epoch, e.mean_k_plus, e.frob_norm, e.substeps});
    return out;
  }
};

struct TrainResult {
  Embedding embedding;      // best snapshot
  DenseMatrix scoring;      // representation used for ranking (P X)
  TrainHistory history;
};

// Validation metric evaluated on the scoring representation; larger is better.
using Validator = std::function<Real(const DenseMatrix&)>;

inline Embedding init_embeddings(Index num_nodes, Index dim, Real scale, std::uint64_t seed) {
  if (!(scale > 0)) throw Error(ErrorKind::kInvalidArgument, "init scale must be > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<Real> normal(0.0, scale);
  Embedding e{DenseMatrix(num_nodes, dim), 0};
  for (Index i = 0; i < num_nodes; ++i) {
    for (Index j = 0; j < dim; ++j) e.values(i, j) = normal(rng);
  }
  return e;
}

inline TrainResult train(const Graph& graph, const NegativeSet& negatives, const TrainConfig& config,
                         const Validator& validator = {}) {
  config.validate();
  NegativeSet current_negatives = negatives;
  std::optional<Objective> objective;
  std::optional<PropagationKernel> kernel;
  auto rebuild = [&] {
    objective.emplace(graph, current_negatives, config.loss_params(), config.masks);
    kernel.emplace(graph, current_negatives, config.kernel_config(), config.masks);
  };
  rebuild();

  const bool run_gradient = config.path != TrainPath::kKernel;
  const bool run_kernel = config.path != TrainPath::kGradient;

  Embedding x = init_embeddings(graph.num_nodes(), config.dim, config.init_scale, config.init_seed);
  DenseMatrix x_kernel = x.values;  // kernel trajectory when path = both

  TrainResult result;
  TrainHistory& history = result.history;
  result.embedding = x;
  int bad_evaluations = 0;
  history.stop_reason = "max_epochs";

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    if (config.resample_negatives && epoch > 1) {
      SamplingOptions opts = negatives.options;
      opts.seed = negatives.options.seed + static_cast<std::uint64_t>(epoch - 1);
      current_negatives = sample_negatives(graph, opts);
      rebuild();
    }
    EpochRecord rec;
    rec.epoch = epoch;
    try {
      const DenseMatrix& main = run_gradient ? x.values : x_kernel;
      const DenseMatrix z = kernel->propagate(main);
      const ScorePair scores = kernel->scores(z);
      rec.mean_k_plus = mean_positive_kernel(kernel->link_kernels(scores));

      SubstepTrace trace;
      SubstepTrace* trace_ptr = config.trace_substeps ? &trace : nullptr;
      if (!run_kernel && trace_ptr) {
        // Trace the equivalent kernel step for the gradient trajectory.
        (void)kernel->apply(main, scores, trace_ptr);
      }
      if (run_kernel) {
        if (run_gradient) {
          x_kernel = kernel->apply(x_kernel, kernel->scores(kernel->propagate(x_kernel)), trace_ptr);
        } else {
          x_kernel = kernel->apply(x_kernel, scores, trace_ptr);
        }
      }
      if (run_gradient) {
        const DenseMatrix g = objective->gradient(x.values);
        x = gd_step(x, g, config.alpha);
      } else {
        x = Embedding{x_kernel, x.step + 1};
      }
      if (config.path == TrainPath::kBoth) {
        rec.path_divergence = (x.values - x_kernel).cwiseAbs().maxCoeff();
        history.max_path_divergence = std::max(history.max_path_divergence, *rec.path_divergence);
      }
      if (trace_ptr) {
        const SubstepSummary s = substep_trace(trace);
        rec.substeps = s.norms;
        rec.substeps_contract = s.contracts();
      }
    } catch (const DivergenceError& e) {
      throw DivergenceError(epoch, std::string("training diverged: ") + e.what());
    }
    rec.loss = objective->loss(x.values);
    rec.frob_norm = frobenius(x.values);
    if (!std::isfinite(rec.loss)) throw DivergenceError(epoch, "loss is not finite");

    bool stop = false;
    if (validator && epoch % config.eval_every == 0) {
      const Real metric = validator(objective->scoring_embeddings(x.values));
      rec.validation = metric;
      if (!history.best_validation || metric > *history.best_validation) {
        history.best_validation = metric;
        history.best_epoch = epoch;
        result.embedding = x;
        bad_evaluations = 0;
      } else if (++bad_evaluations >= config.patience) {
        stop = true;
      }
    }
    history.epochs.push_back(rec);
    history.stop_epoch = epoch;
    if (stop) {
      history.stop_reason = "early_stopping";
      break;
    }
  }
  if (!validator) {
    result.embedding = x;
    history.best_epoch = history.stop_epoch;
  }
  result.scoring = objective->scoring_embeddings(result.embedding.values);
  return result;
}

// Validation Recall@K on the validation part of `splits`.
inline Validator recall_validator(const SplitSet& splits, const Graph& train_graph, int k = kDefaultTopK) {
  return [&splits, &train_graph, k](const DenseMatrix& z) {
    return evaluate(z, splits, train_graph, k, SplitPart::kValidation).recall;
  };
}

struct GridSpec {
  std::vector<Real> alphas{1e-5, 1e-4, 1e-3, 1e-2, 1e-1};
  std::vector<int> layers{1, 3, 5};  // LightGCN only
};

struct GridPoint {
  Real alpha = 0;
  int layers = 0;
  bool divergent = false;
  std::string error;
  Real validation = 0;
  Index stop_epoch = 0;
  Index best_epoch = 0;
};

struct GridResult {
  std::vector<GridPoint> points;
  std::size_t best = 0;
  TrainConfig best_config;
};

// Runs `fn(i)` for i in [0, n) on up to `threads` workers.
template <typename Fn>
void parallel_for_index(std::size_t n, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Picks the point with the highest validation Recall@K; ties go to the
// smaller alpha, then the smaller layer count. Divergent points are
// recorded and skipped.
inline GridResult grid_search(const SplitSet& splits, const NegativeSet& negatives, const TrainConfig& base,
                              GridSpec grid, int threads = 1) {
  if (grid.alphas.empty()) throw Error(ErrorKind::kEmpty, "empty learning-rate grid");
  std::sort(grid.alphas.begin(), grid.alphas.end());
  std::vector<int> layers = base.model == ModelKind::kLightGCN ? grid.layers : std::vector<int>{base.layers};
  if (layers.empty()) throw Error(ErrorKind::kEmpty, "empty layer grid");
  std::sort(layers.begin(), layers.end());

  GridResult result;
  for (Real a : grid.alphas) {
    for (int k : layers) {
      GridPoint p;
      p.alpha = a;
      p.layers = k;
      result.points.push_back(p);
    }
  }
  const Graph train_graph = splits.train_graph();
  const Validator validator = recall_validator(splits, train_graph, base.metric_k);

  parallel_for_index(result.points.size(), threads, [&](std::size_t i) {
    GridPoint& p = result.points[i];
    TrainConfig cfg = base;
    cfg.alpha = p.alpha;
    cfg.layers = p.layers;
    try {
      const TrainResult r = train(train_graph, negatives, cfg, validator);
      p.validation = r.history.best_validation.value_or(0.0);
      p.stop_epoch = r.history.stop_epoch;
      p.best_epoch = r.history.best_epoch;
    } catch (const DivergenceError& e) {
      p.divergent = true;
      p.error = e.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const auto& p = result.points[i];
    if (p.divergent) continue;
    if (!best || p.validation > result.points[*best].validation) best = i;
  }
  if (!best) throw Error(ErrorKind::kDivergence, "every grid point diverged");
  result.best = *best;
  result.best_config = base;
  result.best_config.alpha = result.points[*best].alpha;
  result.best_config.layers = result.points[*best].layers;
  return result;
}

struct EquivalenceReport {
  int steps = 0;
  Real max_step_deviation = 0;        // kernel vs gradient from the same iterate
  Real max_trajectory_deviation = 0;  // two independently iterated trajectories
};

// Iterates the gradient path and the kernel path from `x0` for `steps` steps.
inline EquivalenceReport check_equivalence(const Graph& graph, const NegativeSet& negatives,
                                           const TrainConfig& config, const DenseMatrix& x0, int steps) {
  const Objective objective(graph, negatives, config.loss_params(), config.masks);
  const PropagationKernel kernel(graph, negatives, config.kernel_config(), config.masks);
  EquivalenceReport report;
  report.steps = steps;
  Embedding gd{x0, 0};
  DenseMatrix kx = x0;
  for (int m = 0; m < steps; ++m) {
    const DenseMatrix local = kernel.step(gd.values);
    gd = gd_step(gd, objective.gradient(gd.values), config.alpha);
    kx = kernel.step(kx);
    report.max_step_deviation = std::max(report.max_step_deviation, (local - gd.values).cwiseAbs().maxCoeff());
    report.max_trajectory_deviation = std::max(report.max_trajectory_deviation, (kx - gd.values).cwiseAbs().maxCoeff());
  }
  return report;
}

}  // namespace unilink
