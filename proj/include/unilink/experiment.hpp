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

// Run configuration, end-to-end experiment orchestration and report
// emission.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "unilink/dataset.hpp"
#include "unilink/diagnostics.hpp"
#include "unilink/trainer.hpp"

namespace unilink {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "UNILINK_OUTPUT_DIR";
inline constexpr const char* kThreadsEnv = "UNILINK_THREADS";

struct ConfigKey {
  const char* key;
  const char* default_value;
  const char* help;
};

inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"data.path", "", "edge-list file (pairs or adjacency list)"},
      {"data.format", "auto", "auto | pairs | adjacency"},
      {"data.name", "", "dataset label used in reports (default: file stem)"},
      {"split.ratios", "0.8,0.1,0.1", "train,validation,test fractions per user"},
      {"split.seed", "2024", "split seed"},
      {"sampling.strategy", "auto", "auto | uniform | degree_power (auto: degree_power for LINE)"},
      {"sampling.exponent", "0.75", "degree exponent for degree_power"},
      {"sampling.ratio", "1", "negatives per positive link"},
      {"sampling.seed", "7", "negative sampling seed (offset by repetition)"},
      {"train.models", "mf,lightgcn", "comma list of mf | line | deepwalk | lightgcn"},
      {"train.alpha", "0.01", "learning rate"},
      {"train.beta", "0", "L2 strength"},
      {"train.lambda", "1", "negative-term weight"},
      {"train.window", "5", "DeepWalk window"},
      {"train.layers", "3", "LightGCN layers"},
      {"train.dim", "64", "embedding dimension"},
      {"train.max_epochs", "500", "epoch cap"},
      {"train.patience", "10", "early-stopping patience in evaluations"},
      {"train.path", "gradient", "gradient | kernel | both"},
      {"train.init_scale", "0.01", "std of the normal initialization"},
      {"train.init_seed", "1", "initialization seed (offset by repetition)"},
      {"train.eval_every", "1", "epochs between validation evaluations"},
      {"train.trace_substeps", "false", "record the four substep norms"},
      {"train.resample_negatives", "false", "redraw negatives every epoch"},
      {"train.drop_tolerance", "1e-8", "pruning threshold for random-walk masks on large graphs"},
      {"grid.enabled", "false", "tune alpha (and LightGCN layers) on validation Recall@K"},
      {"grid.alphas", "1e-5,1e-4,1e-3,1e-2,1e-1", "learning-rate grid"},
      {"grid.layers", "1,3,5", "LightGCN layer grid"},
      {"eval.k", "20", "cutoff K for Precision/Recall/NDCG"},
      {"run.repetitions", "1", "independent repetitions (seeds) per model"},
      {"run.output_dir", "out", "output directory (env UNILINK_OUTPUT_DIR)"},
      {"run.threads", "1", "worker threads for grid points (env UNILINK_THREADS)"},
  };
  return keys;
}

// Flat "section.key" -> value map with documented defaults.
class ConfigValues {
 public:
  ConfigValues() {
    for (const auto& k : config_keys()) values_[k.key] = k.default_value;
  }

  static bool known(const std::string& key) {
    for (const auto& k : config_keys()) {
      if (key == k.key) return true;
    }
    return false;
  }

  void set(const std::string& key, const std::string& value) {
    if (!known(key)) throw Error(ErrorKind::kParse, "unknown configuration key '" + key + "'");
    values_[key] = value;
  }

  const std::string& get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw Error(ErrorKind::kParse, "unknown configuration key '" + key + "'");
    return it->second;
  }

  const std::map<std::string, std::string>& all() const noexcept { return values_; }

  // INI-style text: "[section]" headers, "key = value" lines, '#'/';' comments.
  void merge_ini(std::istream& in) {
    std::string line, section;
    Index line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto trimmed = trim(line);
      if (trimmed.empty() || trimmed[0] == '#' || trimmed[0] == ';') continue;
      if (trimmed.front() == '[') {
        if (trimmed.back() != ']') throw Error(ErrorKind::kParse, "config line " + std::to_string(line_no));
        section = trim(trimmed.substr(1, trimmed.size() - 2));
        continue;
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorKind::kParse, "config line " + std::to_string(line_no) + ": expected key = value");
      }
      const auto key = trim(trimmed.substr(0, eq));
      set(section.empty() ? key : section + "." + key, trim(trimmed.substr(eq + 1)));
    }
  }

  void merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kIo, "cannot open config '" + path + "'");
    merge_ini(in);
  }

  void merge_environment() {
    if (const char* dir = std::getenv(kOutputDirEnv)) set("run.output_dir", dir);
    if (const char* t = std::getenv(kThreadsEnv)) set("run.threads", t);
  }

  void write_ini(std::ostream& out) const {
    std::string section;
    for (const auto& k : config_keys()) {
      const std::string key = k.key;
      const auto dot = key.find('.');
      if (key.substr(0, dot) != section) {
        section = key.substr(0, dot);
        out << (out.tellp() > 0 ? "\n" : "") << '[' << section << "]\n";
      }
      out << "# " << k.help << '\n' << key.substr(dot + 1) << " = " << get(key) << '\n';
    }
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

namespace detail {

inline std::vector<std::string> comma_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

inline Real to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const Real r = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::kParse, key + ": expected a number, got '" + v + "'");
  }
}

inline long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  if (!parse_integer(v, out)) throw Error(ErrorKind::kParse, key + ": expected an integer, got '" + v + "'");
  return out;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorKind::kParse, key + ": expected a boolean, got '" + v + "'");
}

}  // namespace detail

struct RunConfig {
  std::string data_path;
  EdgeFormat data_format = EdgeFormat::kAuto;
  std::string dataset_name;
  std::array<Real, 3> split_ratios{0.8, 0.1, 0.1};
  std::uint64_t split_seed = 2024;
  std::string sampling_strategy = "auto";
  SamplingOptions sampling;
  std::vector<ModelKind> models;
  TrainConfig train;
  bool grid_enabled = false;
  GridSpec grid;
  int k = kDefaultTopK;
  int repetitions = 1;
  std::string output_dir = "out";
  int threads = 1;
  ConfigValues source;

  static RunConfig from_values(const ConfigValues& v) {
    using namespace detail;
    RunConfig c;
    c.source = v;
    c.data_path = v.get("data.path");
    c.data_format = parse_edge_format(v.get("data.format"));
    c.dataset_name = v.get("data.name");
    const auto ratios = comma_list(v.get("split.ratios"));
    if (ratios.size() != 3) throw Error(ErrorKind::kParse, "split.ratios: expected three fractions");
    for (std::size_t i = 0; i < 3; ++i) c.split_ratios[i] = to_real("split.ratios", ratios[i]);
    c.split_seed = static_cast<std::uint64_t>(to_int("split.seed", v.get("split.seed")));
    c.sampling_strategy = v.get("sampling.strategy");
    if (c.sampling_strategy != "auto") c.sampling.strategy = parse_sampling_strategy(c.sampling_strategy);
    c.sampling.exponent = to_real("sampling.exponent", v.get("sampling.exponent"));
    c.sampling.ratio = to_int("sampling.ratio", v.get("sampling.ratio"));
    c.sampling.seed = static_cast<std::uint64_t>(to_int("sampling.seed", v.get("sampling.seed")));
    for (const auto& m : comma_list(v.get("train.models"))) c.models.push_back(parse_model(m));
    if (c.models.empty()) throw Error(ErrorKind::kParse, "train.models is empty");
    TrainConfig& t = c.train;
    t.alpha = to_real("train.alpha", v.get("train.alpha"));
    t.beta = to_real("train.beta", v.get("train.beta"));
    t.lambda = to_real("train.lambda", v.get("train.lambda"));
    t.window = static_cast<int>(to_int("train.window", v.get("train.window")));
    t.layers = static_cast<int>(to_int("train.layers", v.get("train.layers")));
    t.dim = to_int("train.dim", v.get("train.dim"));
    t.max_epochs = static_cast<int>(to_int("train.max_epochs", v.get("train.max_epochs")));
    t.patience = static_cast<int>(to_int("train.patience", v.get("train.patience")));
    t.path = parse_train_path(v.get("train.path"));
    t.init_scale = to_real("train.init_scale", v.get("train.init_scale"));
    t.init_seed = static_cast<std::uint64_t>(to_int("train.init_seed", v.get("train.init_seed")));
    t.eval_every = static_cast<int>(to_int("train.eval_every", v.get("train.eval_every")));
    t.trace_substeps = to_bool("train.trace_substeps", v.get("train.trace_substeps"));
    t.resample_negatives = to_bool("train.resample_negatives", v.get("train.resample_negatives"));
    t.masks.drop_tolerance = to_real("train.drop_tolerance", v.get("train.drop_tolerance"));
    c.grid_enabled = to_bool("grid.enabled", v.get("grid.enabled"));
    c.grid.alphas.clear();
    for (const auto& a : comma_list(v.get("grid.alphas"))) c.grid.alphas.push_back(to_real("grid.alphas", a));
    c.grid.layers.clear();
    for (const auto& l : comma_list(v.get("grid.layers")))
      c.grid.layers.push_back(static_cast<int>(to_int("grid.layers", l)));
    c.k = static_cast<int>(to_int("eval.k", v.get("eval.k")));
    t.metric_k = c.k;
    c.repetitions = static_cast<int>(to_int("run.repetitions", v.get("run.repetitions")));
    c.output_dir = v.get("run.output_dir");
    c.threads = static_cast<int>(to_int("run.threads", v.get("run.threads")));
    if (c.repetitions < 1) throw Error(ErrorKind::kInvalidArgument, "run.repetitions must be >= 1");
    if (c.k < 1) throw Error(ErrorKind::kInvalidArgument, "eval.k must be >= 1");
    return c;
  }

  SamplingOptions sampling_for(ModelKind model, int repetition) const {
    SamplingOptions s = sampling;
    if (sampling_strategy == "auto") {
      s.strategy = model == ModelKind::kLINE ? SamplingStrategy::kDegreePower : SamplingStrategy::kUniform;
    }
    s.seed = sampling.seed + static_cast<std::uint64_t>(repetition);
    return s;
  }
};

// Failure tagged with the pipeline stage it came from.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), "[" + stage + "] " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

template <typename Fn>
auto run_stage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  }
}

inline nlohmann::json to_json(const DatasetStats& s) {
  return {{"nodes", s.nodes},   {"links", s.links},     {"users", s.users},
          {"items", s.items},   {"density", s.density}, {"general_density", s.general_density}};
}

inline nlohmann::json to_json(const EvalResult& r) {
  return {{"k", r.k},
          {"precision", r.precision},
          {"recall", r.recall},
          {"ndcg", r.ndcg},
          {"evaluated_users", r.evaluated_users},
          {"skipped_users", r.skipped_users}};
}

inline nlohmann::json to_json(const KernelConfig& c) {
  return {{"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}, {"a1", c.a1}, {"b1", c.b1}, {"a2", c.a2}, {"b2", c.b2},
          {"pos_norm", to_string(c.pos_norm)}, {"neg_norm", to_string(c.neg_norm)}, {"lambda", c.lambda}};
}

inline KernelConfig kernel_config_from_json(const nlohmann::json& j, ModelKind model = ModelKind::kMF) {
  KernelConfig c;
  c.model = model;
  c.c1 = j.at("c1").get<Real>();
  c.c2 = j.at("c2").get<Real>();
  c.c3 = j.at("c3").get<int>();
  c.a1 = j.at("a1").get<int>();
  c.b1 = j.at("b1").get<int>();
  c.a2 = j.at("a2").get<int>();
  c.b2 = j.at("b2").get<int>();
  c.pos_norm = parse_norm_scheme(j.at("pos_norm").get<std::string>());
  c.neg_norm = parse_norm_scheme(j.at("neg_norm").get<std::string>());
  c.lambda = j.at("lambda").get<Real>();
  c.validate();
  return c;
}

inline nlohmann::json history_to_json(const TrainHistory& h) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : h.epochs) {
    nlohmann::json r = {{"epoch", e.epoch}, {"loss", e.loss}, {"mean_k_plus", e.mean_k_plus},
                        {"frob_norm", e.frob_norm}};
    if (e.validation) r["validation"] = *e.validation;
    if (e.path_divergence) r["path_divergence"] = *e.path_divergence;
    if (e.substeps) r["substeps"] = *e.substeps;
    if (e.substeps_contract) r["substeps_contract"] = *e.substeps_contract;
    epochs.push_back(r);
  }
  nlohmann::json out = {{"stop_epoch", h.stop_epoch},
                        {"stop_reason", h.stop_reason},
                        {"best_epoch", h.best_epoch},
                        {"max_path_divergence", h.max_path_divergence},
                        {"epochs", epochs}};
  out["best_validation"] = h.best_validation ? nlohmann::json(*h.best_validation) : nlohmann::json();
  return out;
}

// Checks the structure every report must carry.
inline std::vector<std::string> validate_report(const nlohmann::json& r) {
  std::vector<std::string> problems;
  auto need = [&](const nlohmann::json& obj, const std::string& key, nlohmann::json::value_t type,
                  const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
      problems.push_back(where + "." + key + " missing");
      return false;
    }
    const auto t = obj.at(key).type();
    const bool numeric = type == nlohmann::json::value_t::number_float &&
                         (t == nlohmann::json::value_t::number_integer ||
                          t == nlohmann::json::value_t::number_unsigned);
    const bool integral = type == nlohmann::json::value_t::number_integer &&
                          t == nlohmann::json::value_t::number_unsigned;
    if (t != type && !numeric && !integral) {
      problems.push_back(where + "." + key + " has wrong type");
      return false;
    }
    return true;
  };
  using T = nlohmann::json::value_t;
  need(r, "tool", T::string, "report");
  need(r, "version", T::string, "report");
  need(r, "config", T::object, "report");
  if (need(r, "dataset", T::object, "report")) {
    for (const char* k : {"nodes", "links", "users", "items"}) need(r["dataset"], k, T::number_integer, "dataset");
    for (const char* k : {"density", "general_density"}) need(r["dataset"], k, T::number_float, "dataset");
    need(r["dataset"], "name", T::string, "dataset");
  }
  need(r, "split", T::object, "report");
  if (need(r, "models", T::array, "report")) {
    for (const auto& m : r["models"]) {
      need(m, "model", T::string, "model");
      need(m, "kernel", T::object, "model");
      need(m, "selected", T::object, "model");
      need(m, "mean", T::object, "model");
      if (need(m, "runs", T::array, "model")) {
        for (const auto& run : m["runs"]) {
          need(run, "seed", T::number_integer, "run");
          for (const char* k : {"precision", "recall", "ndcg"}) {
            if (need(run, k, T::number_float, "run")) {
              const Real v = run[k].get<Real>();
              if (v < 0 || v > 1) problems.push_back(std::string("run.") + k + " outside [0,1]");
            }
          }
          need(run, "trajectory_file", T::string, "run");
        }
      }
    }
  }
  need(r, "files", T::object, "report");
  return problems;
}

inline void write_embeddings(const DenseMatrix& x, std::ostream& out) {
  out << x.rows() << ' ' << x.cols() << '\n';
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) out << (j ? " " : "") << detail::format_real(x(i, j));
    out << '\n';
  }
}

inline DenseMatrix read_embeddings(std::istream& in) {
  Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) throw Error(ErrorKind::kParse, "bad embedding header");
  DenseMatrix x(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (!(in >> x(i, j))) throw Error(ErrorKind::kParse, "truncated embedding file");
  return x;
}

struct ModelRun {
  TrainResult result;
  EvalResult test;
  std::uint64_t seed = 0;
  std::string trajectory_file;
};

inline std::string format_table(const nlohmann::json& report) {
  std::ostringstream out;
  const auto& d = report["dataset"];
  out << "dataset " << d["name"].get<std::string>() << ": " << d["nodes"] << " nodes, " << d["links"]
      << " links, density " << std::fixed << std::setprecision(3) << 100.0 * d["density"].get<Real>() << "%\n\n";
  out << std::left << std::setw(10) << "model" << std::setw(8) << "runs" << std::setw(14) << "Precision@K"
      << std::setw(12) << "Recall@K" << std::setw(10) << "NDCG@K" << '\n';
  for (const auto& m : report["models"]) {
    const auto& mean = m["mean"];
    out << std::setw(10) << m["model"].get<std::string>() << std::setw(8) << m["runs"].size() << std::setprecision(4)
        << std::setw(14) << mean["precision"].get<Real>() << std::setw(12) << mean["recall"].get<Real>()
        << std::setw(10) << mean["ndcg"].get<Real>() << '\n';
  }
  return out.str();
}

namespace detail {

inline nlohmann::json run_experiment_stages(const RunConfig& config) {
  namespace fs = std::filesystem;
  const Dataset data = run_stage("ingest", [&] {
    if (config.data_path.empty() || !fs::exists(config.data_path)) {
      throw Error(ErrorKind::kIo, "dataset '" + config.data_path + "' does not exist");
    }
    Dataset d = load_edge_list(config.data_path, config.data_format);
    if (!config.dataset_name.empty()) d.name = config.dataset_name;
    return d;
  });
  const SplitSet splits = run_stage("split", [&] { return split_dataset(data.graph, config.split_ratios, config.split_seed); });
  const Graph train_graph = splits.train_graph();
  const fs::path out_dir(config.output_dir);
  run_stage("output", [&] {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create '" + out_dir.string() + "': " + ec.message());
    return 0;
  });

  nlohmann::json report;
  report["tool"] = "unilink";
  report["version"] = kVersion;
  report["config"] = config.source.all();
  report["dataset"] = to_json(compute_stats(data.graph));
  report["dataset"]["name"] = data.name;
  report["split"] = {{"seed", splits.seed},
                     {"ratios", splits.ratios},
                     {"train", splits.count(SplitPart::kTrain)},
                     {"validation", splits.count(SplitPart::kValidation)},
                     {"test", splits.count(SplitPart::kTest)},
                     {"flagged_users", splits.flagged_users.size()}};
  report["models"] = nlohmann::json::array();

  std::ostringstream csv;
  csv << "dataset,model,seed,k,precision,recall,ndcg\n";
  auto csv_row = [&](const std::string& model, const std::string& seed, const EvalResult& r) {
    csv << data.name << ',' << model << ',' << seed << ',' << r.k << ',' << detail::format_real(r.precision) << ','
        << detail::format_real(r.recall) << ',' << detail::format_real(r.ndcg) << '\n';
  };

  for (ModelKind model : config.models) {
    const std::string name = to_string(model);
    TrainConfig base = config.train;
    base.model = model;
    nlohmann::json entry;
    entry["model"] = name;
    entry["grid"] = nlohmann::json();
    if (config.grid_enabled) {
      const GridResult grid = run_stage("grid:" + name, [&] {
        const NegativeSet negatives = sample_negatives(train_graph, config.sampling_for(model, 0));
        return grid_search(splits, negatives, base, config.grid, config.threads);
      });
      base = grid.best_config;
      nlohmann::json points = nlohmann::json::array();
      for (const auto& p : grid.points) {
        points.push_back({{"alpha", p.alpha},
                          {"layers", p.layers},
                          {"divergent", p.divergent},
                          {"validation_recall", p.validation},
                          {"stop_epoch", p.stop_epoch},
                          {"best_epoch", p.best_epoch}});
      }
      entry["grid"] = points;
    }
    entry["selected"] = {{"alpha", base.alpha}, {"layers", base.layers}, {"window", base.window}};
    entry["kernel"] = to_json(base.kernel_config());

    std::vector<ModelRun> runs(static_cast<std::size_t>(config.repetitions));
    run_stage("train:" + name, [&] {
      const Validator validator = recall_validator(splits, train_graph, config.k);
      parallel_for_index(runs.size(), config.threads, [&](std::size_t r) {
        TrainConfig cfg = base;
        cfg.init_seed = base.init_seed + r;
        const NegativeSet negatives = sample_negatives(train_graph, config.sampling_for(model, static_cast<int>(r)));
        runs[r].seed = cfg.init_seed;
        runs[r].result = train(train_graph, negatives, cfg, validator);
      });
      return 0;
    });
    std::vector<EvalResult> per_seed;
    nlohmann::json run_rows = nlohmann::json::array();
    for (auto& run : runs) {
      run.test = run_stage("evaluate:" + name, [&] {
        return evaluate(run.result.scoring, splits, train_graph, config.k, SplitPart::kTest);
      });
      run.trajectory_file = "trajectory_" + name + "_seed" + std::to_string(run.seed) + ".csv";
      run_stage("emit", [&] {
        emit_trajectories(run.result.history.trajectories(), (out_dir / run.trajectory_file).string());
        return 0;
      });
      per_seed.push_back(run.test);
      csv_row(name, std::to_string(run.seed), run.test);
      nlohmann::json row = to_json(run.test);
      row["seed"] = run.seed;
      row["stop_epoch"] = run.result.history.stop_epoch;
      row["best_epoch"] = run.result.history.best_epoch;
      row["stop_reason"] = run.result.history.stop_reason;
      row["best_validation"] = run.result.history.best_validation.value_or(0.0);
      row["trajectory_file"] = run.trajectory_file;
      if (base.path == TrainPath::kBoth) row["max_path_divergence"] = run.result.history.max_path_divergence;
      run_rows.push_back(row);
    }
    const EvalSummary summary = aggregate(per_seed);
    csv_row(name, "mean", summary.mean);
    entry["runs"] = run_rows;
    entry["mean"] = to_json(summary.mean);
    report["models"].push_back(entry);
  }

  report["files"] = {{"report_json", "report.json"}, {"report_txt", "report.txt"}, {"metrics_csv", "metrics.csv"}};
  run_stage("emit", [&] {
    auto write = [&](const std::string& file, const std::string& content) {
      std::ofstream out(out_dir / file);
      if (!out) throw Error(ErrorKind::kIo, "cannot write '" + (out_dir / file).string() + "'");
      out << content;
    };
    write("metrics.csv", csv.str());
    write("report.txt", format_table(report));
    write("report.json", report.dump(2) + "\n");
    return 0;
  });
  return report;
}

}  // namespace detail

// ingest -> split -> sample -> (grid) -> train x repetitions -> evaluate ->
// report.json, report.txt, metrics.csv and one trajectory CSV per run.
// On failure any stale report.json is removed and report.failed records the
// failing stage.
inline nlohmann::json run_experiment(const RunConfig& config) {
  namespace fs = std::filesystem;
  const fs::path out_dir(config.output_dir);
  std::error_code ec;
  fs::remove(out_dir / "report.failed", ec);
  try {
    return detail::run_experiment_stages(config);
  } catch (const Error& e) {
    if (fs::is_directory(out_dir, ec)) {
      fs::remove(out_dir / "report.json", ec);
      std::ofstream marker(out_dir / "report.failed");
      marker << e.what() << '\n';
    }
    throw;
  }
}

}  // namespace unilink
