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

#include <filesystem>
#include <sstream>

#include "support.hpp"

namespace unilink {
namespace {

using testing::random_graph;
using testing::random_matrix;

TEST(MeanPositiveKernel, OriginMfIsHalf) {
  const Graph g = random_graph(12, 0.2, 1);
  const NegativeSet neg = testing::uniform_negatives(g, 1);
  const PropagationKernel k(g, neg, model_config(ModelKind::kMF, 0.1, 0.0));
  EXPECT_EQ(mean_positive_kernel(k.link_kernels(k.scores(DenseMatrix::Zero(12, 4)))), 0.5);
}

TEST(MeanPositiveKernel, MatchesDenseMeanOracle) {
  const Index n = 15;
  const Graph g = random_graph(n, 0.2, 2);
  const NegativeSet neg = testing::uniform_negatives(g, 2);
  const PropagationKernel k(g, neg, model_config(ModelKind::kMF, 0.1, 0.0));
  const DenseMatrix x = random_matrix(n, 4, 1.0, 3);
  const double got = mean_positive_kernel(k.link_kernels(k.scores(x)));
  const auto xd = oracle::from_matrix(x);
  double sum = 0;
  int count = 0;
  for (const Edge& e : g.edges()) {
    sum += 2 * (1.0 - oracle::oracle_sigmoid(oracle::dot_rows(xd, e.u, e.v)));
    count += 2;
  }
  EXPECT_NEAR(got, sum / count, 1e-12);
}

TEST(MeanPositiveKernel, MonotoneInScores) {
  const Graph g = random_graph(10, 0.3, 4);
  const NegativeSet neg = testing::random_negatives(g, 4);
  const PropagationKernel k(g, neg, model_config(ModelKind::kMF, 0.1, 0.0));
  const DenseMatrix x = random_matrix(10, 3, 1.0, 5);
  ScorePair s = k.scores(x);
  const double before = mean_positive_kernel(k.link_kernels(s));
  s.s_a *= 0.9;
  EXPECT_LT(mean_positive_kernel(k.link_kernels(s)), before);
}

TEST(MeanPositiveKernel, EmptySupportIsAnError) {
  LinkKernels k{SparseMatrix(3, 3), SparseMatrix(3, 3)};
  EXPECT_THROW(mean_positive_kernel(k), Error);
}

TEST(Frobenius, Examples) {
  EXPECT_EQ(frobenius(DenseMatrix::Zero(3, 2)), 0.0);
  EXPECT_NEAR(frobenius(DenseMatrix::Identity(3, 3)), std::sqrt(3.0), 1e-15);
  const DenseMatrix x = random_matrix(7, 5, 1.0, 6);
  double sq = 0;
  for (Index i = 0; i < 7; ++i) {
    for (Index j = 0; j < 5; ++j) sq += x(i, j) * x(i, j);
  }
  EXPECT_NEAR(frobenius(x), std::sqrt(sq), 1e-12);
}

TEST(SubstepTrace, SymmetricSchemeContracts) {
  const Graph g = random_graph(20, 0.15, 7);
  const NegativeSet neg = testing::uniform_negatives(g, 7);
  const PropagationKernel k(g, neg, model_config(ModelKind::kLightGCN, 0.1, 0.0, 1.0, 1, 3));
  SubstepTrace t;
  const DenseMatrix x = random_matrix(20, 4, 1.0, 8);
  k.step(x, &t);
  const SubstepSummary s = substep_trace(t);
  EXPECT_LE(s.norms[0], x.norm());
  EXPECT_TRUE(s.first_contracts);
  EXPECT_TRUE(s.third_contracts);
}

TEST(SubstepTrace, FlagsGrowthAndRejectsMalformed) {
  SubstepTrace t;
  t.input_norm = 1.0;
  t.entries = {{1, 2.0}, {2, 1.0}, {3, 0.5}, {4, 1.0}};
  EXPECT_FALSE(substep_trace(t).first_contracts);
  EXPECT_TRUE(substep_trace(t).third_contracts);
  EXPECT_FALSE(substep_trace(t).contracts());
  t.entries.pop_back();
  EXPECT_THROW(substep_trace(t), Error);
  t.entries = {{2, 1.0}, {1, 1.0}, {3, 1.0}, {4, 1.0}};
  EXPECT_THROW(substep_trace(t), Error);
}

TEST(Trajectories, ThreeStepFileHasFourLines) {
  std::vector<TrajectoryRecord> recs{{1, 0.5, 1.0, std::nullopt}, {2, 0.4, 1.1, std::nullopt}, {3, 0.3, 1.2, std::nullopt}};
  const auto path = (std::filesystem::temp_directory_path() / "unilink_traj_test.csv").string();
  emit_trajectories(recs, path);
  std::ifstream in(path);
  int lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 4);
  EXPECT_EQ(read_trajectories(path), recs);
  std::filesystem::remove(path);
}

TEST(Trajectories, RoundTripIsExact) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::vector<TrajectoryRecord> recs;
  for (Index s = 1; s <= 50; ++s) {
    TrajectoryRecord r{s, u(rng) / 3.0, std::exp(u(rng) / 100.0), std::nullopt};
    if (s % 2 == 0) r.substeps = std::array<double, 4>{u(rng), 1.0 / 3.0, std::nextafter(1.0, 2.0), 1e-300};
    recs.push_back(r);
  }
  std::stringstream buf;
  write_trajectories(buf, recs);
  EXPECT_EQ(read_trajectories(buf), recs);
}

TEST(Trajectories, ParseErrors) {
  std::stringstream no_header("1,2,3,,,,\n");
  EXPECT_THROW(read_trajectories(no_header), Error);
  std::stringstream bad(std::string(kTrajectoryHeader) + "\n1,x,3,,,,\n");
  EXPECT_THROW(read_trajectories(bad), Error);
  std::stringstream short_row(std::string(kTrajectoryHeader) + "\n1,2\n");
  EXPECT_THROW(read_trajectories(short_row), Error);
  EXPECT_THROW(emit_trajectories({}, "/nonexistent_dir/x.csv"), Error);
}

TEST(Trajectories, TrainingHistoryExport) {
  const Graph g = random_graph(20, 0.15, 10);
  const NegativeSet neg = testing::uniform_negatives(g, 10);
  TrainConfig c = testing::model_train_config(ModelKind::kMF, 0.1, 0.0, 8);
  c.init_scale = 0.3;
  c.max_epochs = 30;
  const auto traj = train(g, neg, c).history.trajectories();
  ASSERT_EQ(traj.size(), 30u);
  // Fitting the training links lowers the positive kernel over time.
  EXPECT_LT(traj.back().mean_k_plus, traj.front().mean_k_plus);
  for (std::size_t i = 0; i < traj.size(); ++i) EXPECT_EQ(traj[i].step, static_cast<Index>(i + 1));
}

}  // namespace
}  // namespace unilink
