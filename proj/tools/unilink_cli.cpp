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

// Command-line front end: ingest, split, train, evaluate,
// verify-equivalence, verify-stats, report, generate and config.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "unilink/unilink.hpp"

namespace fs = std::filesystem;
using namespace unilink;

namespace {

using Overrides = std::map<std::string, std::string>;

void add_config_options(CLI::App* app, Overrides& overrides, std::string& config_file) {
  app->add_option("--config", config_file, "INI configuration file");
  for (const auto& key : config_keys()) {
    const std::string name = key.key;
    app->add_option_function<std::string>(
           "--" + name, [&overrides, name](const std::string& v) { overrides[name] = v; },
           std::string(key.help) + " [default: " + key.default_value + "]")
        ->group("Configuration");
  }
}

// defaults < environment < config file < flags
ConfigValues resolve_config(const Overrides& overrides, const std::string& config_file) {
  ConfigValues v;
  v.merge_environment();
  if (!config_file.empty()) v.merge_file(config_file);
  for (const auto& [k, val] : overrides) v.set(k, val);
  return v;
}

template <typename T>
void write_file(const fs::path& path, const T& writer) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  writer(out);
}

void print_stats(const Dataset& d) {
  const auto s = compute_stats(d.graph);
  std::cout << "dataset: " << d.name << "\nusers: " << s.users << "\nitems: " << s.items << "\nnodes: " << s.nodes
            << "\nlinks: " << s.links << "\ndensity: " << 100.0 * s.density << "%\n";
}

SplitSet load_or_make_split(const Dataset& d, const std::string& split_path, const RunConfig& rc) {
  if (split_path.empty()) return split_dataset(d.graph, rc.split_ratios, rc.split_seed);
  std::ifstream in(split_path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open split '" + split_path + "'");
  return read_split(d, in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "unilink: link prediction with MF, LINE, DeepWalk and LightGCN as gradient learners and as\n"
      "propagation kernels.\n\n"
      "Environment:\n"
      "  UNILINK_OUTPUT_DIR  default for run.output_dir\n"
      "  UNILINK_THREADS     default for run.threads"};
  app.require_subcommand(1);

  // ingest
  std::string ingest_input, ingest_format = "auto", ingest_out;
  auto* ingest = app.add_subcommand("ingest", "parse an edge list and write its canonical form");
  ingest->add_option("input", ingest_input, "edge-list file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--format", ingest_format, "auto | pairs | adjacency");
  ingest->add_option("--out", ingest_out, "canonical output path");

  // verify-stats
  std::string vs_input, vs_format = "auto";
  ExpectedStats expected;
  auto* verify_stats_cmd = app.add_subcommand("verify-stats", "compare dataset statistics with expected values");
  verify_stats_cmd->add_option("input", vs_input, "edge-list file")->required()->check(CLI::ExistingFile);
  verify_stats_cmd->add_option("--format", vs_format, "auto | pairs | adjacency");
  verify_stats_cmd->add_option("--nodes", expected.nodes, "expected node count")->required();
  verify_stats_cmd->add_option("--links", expected.links, "expected link count")->required();
  verify_stats_cmd->add_option("--density", expected.density_percent, "expected density in percent")->required();
  verify_stats_cmd->add_option("--decimals", expected.density_decimals, "published density decimals");

  // split
  std::string split_input, split_ratios = "0.8,0.1,0.1", split_out = "split.tsv";
  std::uint64_t split_seed = 2024;
  auto* split = app.add_subcommand("split", "per-user train/validation/test split");
  split->add_option("input", split_input, "edge-list file")->required()->check(CLI::ExistingFile);
  split->add_option("--ratios", split_ratios, "train,validation,test");
  split->add_option("--seed", split_seed, "split seed");
  split->add_option("--out", split_out, "split file (user, item, part)");

  // train
  Overrides train_over;
  std::string train_config, train_split, train_model = "mf";
  auto* train_cmd = app.add_subcommand("train", "train one model and write embeddings and history");
  add_config_options(train_cmd, train_over, train_config);
  train_cmd->add_option("--split", train_split, "split file from `split` (default: split on the fly)");
  train_cmd->add_option("--model", train_model, "mf | line | deepwalk | lightgcn");

  // evaluate
  std::string ev_data, ev_split, ev_scoring, ev_out, ev_model = "model", ev_seed = "0";
  int ev_k = kDefaultTopK;
  auto* eval_cmd = app.add_subcommand("evaluate", "Precision/Recall/NDCG@K of trained embeddings");
  eval_cmd->add_option("--data", ev_data, "edge-list file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--split", ev_split, "split file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--scoring", ev_scoring, "scoring embeddings from `train`")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--k", ev_k, "cutoff");
  eval_cmd->add_option("--model", ev_model, "model label for the CSV row");
  eval_cmd->add_option("--seed", ev_seed, "seed label for the CSV row");
  eval_cmd->add_option("--out", ev_out, "metrics CSV (default: stdout)");

  // verify-equivalence
  Overrides eq_over;
  std::string eq_config, eq_model = "mf";
  int eq_steps = 50, eq_random_nodes = 0;
  double eq_scale = 0.1;
  std::uint64_t eq_seed = 1;
  auto* eq_cmd = app.add_subcommand("verify-equivalence", "iterate kernel and gradient paths side by side");
  add_config_options(eq_cmd, eq_over, eq_config);
  eq_cmd->add_option("--model", eq_model, "mf | line | deepwalk | lightgcn");
  eq_cmd->add_option("--steps", eq_steps, "number of steps");
  eq_cmd->add_option("--random-nodes", eq_random_nodes, "use a seeded random graph with this many nodes");
  eq_cmd->add_option("--scale", eq_scale, "initialization scale");
  eq_cmd->add_option("--seed", eq_seed, "seed for graph and initialization");

  // report
  Overrides rep_over;
  std::string rep_config;
  auto* report_cmd = app.add_subcommand("report", "run the full protocol and write report files");
  add_config_options(report_cmd, rep_over, rep_config);

  // generate
  SyntheticSpec syn;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "write a planted-community bipartite benchmark");
  gen->add_option("--users", syn.users);
  gen->add_option("--items", syn.items);
  gen->add_option("--communities", syn.communities);
  gen->add_option("--min-degree", syn.min_degree);
  gen->add_option("--max-degree", syn.max_degree);
  gen->add_option("--in-community", syn.in_community);
  gen->add_option("--seed", syn.seed);
  gen->add_option("--out", gen_out)->required();

  auto* config_cmd = app.add_subcommand("config", "print the default configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const Dataset d = load_edge_list(ingest_input, parse_edge_format(ingest_format));
      print_stats(d);
      if (!ingest_out.empty()) {
        write_file(ingest_out, [&](std::ostream& o) { write_canonical(d, o); });
        std::cout << "canonical: " << ingest_out << '\n';
      }
    } else if (*verify_stats_cmd) {
      const Dataset d = load_edge_list(vs_input, parse_edge_format(vs_format));
      const StatsCheck c = verify_stats(d.graph, expected);
      print_stats(d);
      for (const auto& m : c.mismatches) std::cout << "mismatch: " << m << '\n';
      std::cout << (c.pass ? "PASS" : "FAIL") << '\n';
      return c.pass ? 0 : 1;
    } else if (*split) {
      const Dataset d = load_edge_list(split_input);
      ConfigValues v;
      v.set("split.ratios", split_ratios);
      const RunConfig rc = RunConfig::from_values(v);
      const SplitSet s = split_dataset(d.graph, rc.split_ratios, split_seed);
      write_file(split_out, [&](std::ostream& o) { write_split(d, s, o); });
      std::cout << "train " << s.count(SplitPart::kTrain) << ", validation " << s.count(SplitPart::kValidation)
                << ", test " << s.count(SplitPart::kTest) << ", flagged users " << s.flagged_users.size() << '\n';
    } else if (*train_cmd) {
      const RunConfig rc = RunConfig::from_values(resolve_config(train_over, train_config));
      const Dataset d = load_edge_list(rc.data_path, rc.data_format);
      const SplitSet s = load_or_make_split(d, train_split, rc);
      const Graph tg = s.train_graph();
      TrainConfig cfg = rc.train;
      cfg.model = parse_model(train_model);
      const NegativeSet neg = sample_negatives(tg, rc.sampling_for(cfg.model, 0));
      const TrainResult r = train(tg, neg, cfg, recall_validator(s, tg, rc.k));
      const fs::path dir(rc.output_dir);
      write_file(dir / "embeddings.txt", [&](std::ostream& o) { write_embeddings(r.embedding.values, o); });
      write_file(dir / "scoring.txt", [&](std::ostream& o) { write_embeddings(r.scoring, o); });
      write_file(dir / "history.json", [&](std::ostream& o) { o << history_to_json(r.history).dump(2) << '\n'; });
      emit_trajectories(r.history.trajectories(), (dir / "trajectory.csv").string());
      std::cout << "stopped at epoch " << r.history.stop_epoch << " (" << r.history.stop_reason << "), best epoch "
                << r.history.best_epoch << ", validation recall@" << rc.k << " "
                << r.history.best_validation.value_or(0.0) << "\noutputs in " << dir.string() << '\n';
    } else if (*eval_cmd) {
      const Dataset d = load_edge_list(ev_data);
      std::ifstream sin(ev_split);
      const SplitSet s = read_split(d, sin);
      std::ifstream ein(ev_scoring);
      const DenseMatrix z = read_embeddings(ein);
      const EvalResult r = evaluate(z, s, s.train_graph(), ev_k, SplitPart::kTest);
      auto emit = [&](std::ostream& o) {
        o << "dataset,model,seed,k,precision,recall,ndcg\n"
          << d.name << ',' << ev_model << ',' << ev_seed << ',' << r.k << ',' << detail::format_real(r.precision)
          << ',' << detail::format_real(r.recall) << ',' << detail::format_real(r.ndcg) << '\n';
      };
      if (ev_out.empty()) {
        emit(std::cout);
      } else {
        write_file(ev_out, emit);
      }
    } else if (*eq_cmd) {
      const RunConfig rc = RunConfig::from_values(resolve_config(eq_over, eq_config));
      Graph g;
      if (eq_random_nodes > 0) {
        std::mt19937_64 rng(eq_seed);
        std::bernoulli_distribution coin(0.25);
        std::vector<NodePair> edges;
        for (Index i = 0; i < eq_random_nodes; ++i)
          for (Index j = i + 1; j < eq_random_nodes; ++j)
            if (coin(rng)) edges.emplace_back(i, j);
        g = build_graph(eq_random_nodes, edges);
      } else {
        g = load_edge_list(rc.data_path, rc.data_format).graph;
      }
      TrainConfig cfg = rc.train;
      cfg.model = parse_model(eq_model);
      const NegativeSet neg = sample_negatives(g, rc.sampling_for(cfg.model, 0));
      const DenseMatrix x0 = init_embeddings(g.num_nodes(), cfg.dim, eq_scale, eq_seed).values;
      const EquivalenceReport rep = check_equivalence(g, neg, cfg, x0, eq_steps);
      const nlohmann::json j = {{"model", eq_model},
                                {"nodes", g.num_nodes()},
                                {"links", g.num_edges()},
                                {"steps", rep.steps},
                                {"kernel", to_json(cfg.kernel_config())},
                                {"max_step_deviation", rep.max_step_deviation},
                                {"max_trajectory_deviation", rep.max_trajectory_deviation}};
      std::cout << j.dump(2) << '\n';
      return rep.max_step_deviation < 1e-8 && rep.max_trajectory_deviation < 1e-6 ? 0 : 1;
    } else if (*report_cmd) {
      const RunConfig rc = RunConfig::from_values(resolve_config(rep_over, rep_config));
      const nlohmann::json report = run_experiment(rc);
      std::cout << format_table(report) << "\nreport written to " << rc.output_dir << "/report.json\n";
    } else if (*gen) {
      const Dataset d = dataset_from_raw(generate_bipartite(syn), "synthetic");
      write_file(gen_out, [&](std::ostream& o) { write_canonical(d, o); });
      print_stats(d);
    } else if (*config_cmd) {
      ConfigValues().write_ini(std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
