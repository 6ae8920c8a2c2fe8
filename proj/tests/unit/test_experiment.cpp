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

#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "support.hpp"

namespace unilink {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("unilink_exp_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig toy_config(const fs::path& out, const std::string& models = "mf") {
  ConfigValues v;
  v.set("data.path", std::string(UNILINK_DATA_DIR) + "/toy_50.tsv");
  v.set("train.models", models);
  v.set("train.dim", "8");
  v.set("train.max_epochs", "40");
  v.set("train.layers", "2");
  v.set("run.output_dir", out.string());
  return RunConfig::from_values(v);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(ConfigValues, DefaultsIniAndUnknownKeys) {
  ConfigValues v;
  EXPECT_EQ(v.get("eval.k"), "20");
  std::istringstream ini("# comment\n[train]\nalpha = 0.05\n; other\n[eval]\nk=10\n");
  v.merge_ini(ini);
  EXPECT_EQ(v.get("train.alpha"), "0.05");
  EXPECT_EQ(v.get("eval.k"), "10");
  std::istringstream bad("[train]\nlearning_rate = 1\n");
  EXPECT_THROW(v.merge_ini(bad), Error);
  std::istringstream malformed("[train\n");
  EXPECT_THROW(v.merge_ini(malformed), Error);
  EXPECT_THROW(v.get("nope"), Error);
  for (const auto& k : config_keys()) {
    EXPECT_TRUE(ConfigValues::known(k.key));
    EXPECT_GT(std::string(k.help).size(), 0u);
  }
}

TEST(ConfigValues, WriteIniRoundTrips) {
  ConfigValues v;
  v.set("train.models", "line,deepwalk");
  v.set("grid.enabled", "true");
  std::stringstream buf;
  v.write_ini(buf);
  ConfigValues w;
  w.merge_ini(buf);
  EXPECT_EQ(w.all(), v.all());
}

TEST(ConfigValues, EnvironmentOverrides) {
  ::setenv(kOutputDirEnv, "/tmp/from_env", 1);
  ::setenv(kThreadsEnv, "3", 1);
  ConfigValues v;
  v.merge_environment();
  ::unsetenv(kOutputDirEnv);
  ::unsetenv(kThreadsEnv);
  EXPECT_EQ(v.get("run.output_dir"), "/tmp/from_env");
  EXPECT_EQ(RunConfig::from_values(v).threads, 3);
}

TEST(RunConfig, ParsesAndValidates) {
  ConfigValues v;
  v.set("train.models", "mf,line,deepwalk,lightgcn");
  const RunConfig c = RunConfig::from_values(v);
  ASSERT_EQ(c.models.size(), 4u);
  EXPECT_EQ(c.sampling_for(ModelKind::kLINE, 0).strategy, SamplingStrategy::kDegreePower);
  EXPECT_EQ(c.sampling_for(ModelKind::kMF, 0).strategy, SamplingStrategy::kUniform);
  EXPECT_EQ(c.sampling_for(ModelKind::kMF, 2).seed, c.sampling.seed + 2);
  EXPECT_EQ(c.grid.alphas.size(), 5u);
  v.set("run.repetitions", "0");
  EXPECT_THROW(RunConfig::from_values(v), Error);
  v.set("run.repetitions", "1");
  v.set("train.alpha", "fast");
  EXPECT_THROW(RunConfig::from_values(v), Error);
  v.set("train.alpha", "0.1");
  v.set("split.ratios", "0.8,0.2");
  EXPECT_THROW(RunConfig::from_values(v), Error);
  v.set("split.ratios", "0.8,0.1,0.1");
  v.set("train.models", "gat");
  EXPECT_THROW(RunConfig::from_values(v), Error);
}

TEST(KernelJson, RoundTrip) {
  for (ModelKind m : {ModelKind::kMF, ModelKind::kLINE, ModelKind::kDeepWalk, ModelKind::kLightGCN}) {
    const KernelConfig c = model_config(m, 0.01, 0.001, 1.0, 3, 2);
    EXPECT_EQ(kernel_config_from_json(to_json(c), m), c);
  }
}

TEST(Embeddings, TextRoundTripIsExact) {
  const DenseMatrix x = testing::random_matrix(7, 3, 1.0, 1);
  std::stringstream buf;
  write_embeddings(x, buf);
  EXPECT_EQ(read_embeddings(buf), x);
  std::stringstream truncated("2 2\n1 2 3\n");
  EXPECT_THROW(read_embeddings(truncated), Error);
}

TEST(RunExperiment, ToyMfSmokeRun) {
  const fs::path out = scratch("smoke");
  const auto start = std::chrono::steady_clock::now();
  const nlohmann::json report = run_experiment(toy_config(out));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(secs, 5.0);
  EXPECT_TRUE(validate_report(report).empty());
  const auto reread = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_TRUE(validate_report(reread).empty());
  EXPECT_EQ(reread, report);
  EXPECT_TRUE(fs::exists(out / "report.txt"));
  EXPECT_TRUE(fs::exists(out / "metrics.csv"));
  for (const auto& m : report["models"]) {
    for (const auto& run : m["runs"]) EXPECT_TRUE(fs::exists(out / run["trajectory_file"].get<std::string>()));
  }
  EXPECT_EQ(report["dataset"]["nodes"], 47);
  EXPECT_EQ(report["dataset"]["links"], 85);
  fs::remove_all(out);
}

TEST(RunExperiment, FiveRepetitionsGiveFiveRowsAndMean) {
  const fs::path out = scratch("reps");
  RunConfig c = toy_config(out, "mf,lightgcn");
  c.repetitions = 5;
  const nlohmann::json report = run_experiment(c);
  for (const auto& m : report["models"]) {
    ASSERT_EQ(m["runs"].size(), 5u);
    double sum = 0;
    for (const auto& r : m["runs"]) sum += r["recall"].get<double>();
    EXPECT_NEAR(m["mean"]["recall"].get<double>(), sum / 5, 1e-15);
  }
  std::istringstream csv(slurp(out / "metrics.csv"));
  int rows = 0, means = 0;
  for (std::string line; std::getline(csv, line);) {
    ++rows;
    if (line.find(",mean,") != std::string::npos) ++means;
  }
  EXPECT_EQ(rows, 1 + 2 * 6);
  EXPECT_EQ(means, 2);
  fs::remove_all(out);
}

TEST(RunExperiment, BothPathsRecordDivergence) {
  const fs::path out = scratch("both");
  RunConfig c = toy_config(out, "lightgcn");
  c.train.path = TrainPath::kBoth;
  c.train.max_epochs = 15;
  const nlohmann::json report = run_experiment(c);
  const auto& run = report["models"][0]["runs"][0];
  ASSERT_TRUE(run.contains("max_path_divergence"));
  EXPECT_LT(run["max_path_divergence"].get<double>(), 1e-6);
  fs::remove_all(out);
}

TEST(RunExperiment, GridSelectionIsReported) {
  const fs::path out = scratch("grid");
  RunConfig c = toy_config(out, "lightgcn");
  c.grid_enabled = true;
  c.grid.alphas = {1e-3, 1e-2};
  c.grid.layers = {1, 2};
  c.train.max_epochs = 10;
  const nlohmann::json report = run_experiment(c);
  const auto& m = report["models"][0];
  ASSERT_EQ(m["grid"].size(), 4u);
  EXPECT_TRUE(validate_report(report).empty());
  fs::remove_all(out);
}

TEST(RunExperiment, IdenticalConfigGivesIdenticalFiles) {
  const fs::path a = scratch("repro_a"), b = scratch("repro_b");
  RunConfig ca = toy_config(a, "mf,lightgcn");
  RunConfig cb = toy_config(b, "mf,lightgcn");
  ca.repetitions = cb.repetitions = 2;
  run_experiment(ca);
  run_experiment(cb);
  for (const char* f : {"metrics.csv", "report.txt", "trajectory_mf_seed1.csv", "trajectory_lightgcn_seed2.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  auto ja = nlohmann::json::parse(slurp(a / "report.json"));
  auto jb = nlohmann::json::parse(slurp(b / "report.json"));
  ja["config"].erase("run.output_dir");
  jb["config"].erase("run.output_dir");
  EXPECT_EQ(ja.dump(), jb.dump());
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(RunExperiment, FailuresAreStageTaggedAndMarked) {
  const fs::path out = scratch("fail");
  RunConfig c = toy_config(out);
  c.data_path = "/nonexistent/data.tsv";
  try {
    run_experiment(c);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "ingest");
  }
  // A later-stage failure leaves a marker and no report.
  RunConfig d = toy_config(out);
  run_experiment(d);
  ASSERT_TRUE(fs::exists(out / "report.json"));
  d.train.alpha = 1e6;
  d.train.init_scale = 10.0;
  d.train.max_epochs = 200;
  d.train.patience = 1000;
  EXPECT_THROW(run_experiment(d), StageError);
  EXPECT_FALSE(fs::exists(out / "report.json"));
  EXPECT_TRUE(fs::exists(out / "report.failed"));
  EXPECT_NE(slurp(out / "report.failed").find("[train:mf]"), std::string::npos);
  fs::remove_all(out);
}

TEST(ValidateReport, FlagsMissingAndOutOfRange) {
  nlohmann::json r = {{"tool", "unilink"}};
  EXPECT_FALSE(validate_report(r).empty());
  const fs::path out = scratch("schema");
  nlohmann::json good = run_experiment(toy_config(out));
  good["models"][0]["runs"][0]["recall"] = 1.5;
  const auto problems = validate_report(good);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("recall"), std::string::npos);
  fs::remove_all(out);
}

}  // namespace
}  // namespace unilink
