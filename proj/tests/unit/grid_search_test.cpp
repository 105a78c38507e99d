// Copyright 2026 The atrisk Authors
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

#include "atrisk/grid_search.hpp"

#include <set>

#include <gtest/gtest.h>

#include "atrisk/cohortsim.hpp"
#include "atrisk/error.hpp"
#include "test_util.hpp"

namespace atrisk {
namespace {

LabeledDataset cohort_train(std::uint64_t seed, int week = 3) {
  SimConfig config;
  config.seed = seed;
  auto cohort = simulate(config);
  auto data = encode(cohort.records, cohort.manifest, week);
  return split(data, SplitSpec{0.8, seed}).train;
}

GridSpec small_grid(std::uint64_t seed) {
  GridSpec grid;
  grid.resamplers = {{ResampleMethod::smote, 5}};
  grid.models = {ModelSpec::from_parameters(ModelKind::logreg, {{"penalty", "elasticnet"}, {"l1_ratio", "0.5"}, {"C", "0.01"}})};
  grid.thresholds = {0.5};
  grid.seed = seed;
  return grid;
}

TEST(StratifiedFolds, BalancedPerClass) {
  std::vector<bool> labels(303);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i >= 45;
  auto folds = stratified_folds(labels, 5, 3);
  std::array<std::array<int, 2>, 5> counts{};
  for (std::size_t i = 0; i < labels.size(); ++i) ++counts[folds[i]][labels[i]];
  for (const auto& c : counts) {
    EXPECT_EQ(c[0], 9);
    EXPECT_TRUE(c[1] == 51 || c[1] == 52) << c[1];
  }
  int total = 0;
  for (const auto& c : counts) total += c[0] + c[1];
  EXPECT_EQ(total, 303);
  EXPECT_THROW(stratified_folds(labels, 1, 3), InvalidArgument);
  EXPECT_EQ(folds, stratified_folds(labels, 5, 3));
}

TEST(StandardGrid, Size) {
  auto grid = GridSpec::standard();
  EXPECT_EQ(grid.resamplers.size(), 3u);
  EXPECT_EQ(grid.models.size(), 16u);
  EXPECT_EQ(grid.thresholds.size(), 9u);
  EXPECT_DOUBLE_EQ(grid.thresholds.front(), 0.30);
  EXPECT_DOUBLE_EQ(grid.thresholds.back(), 0.70);
}

TEST(GridSearch, SingleCellEqualsManualFoldLoop) {
  auto train = cohort_train(21);
  auto grid = small_grid(4);
  auto result = grid_search(grid, train);
  ASSERT_EQ(result.ranked.size(), 1u);
  const auto& cell = result.ranked[0];
  ASSERT_TRUE(cell.feasible);
  ASSERT_EQ(cell.per_fold.size(), 5u);

  auto folds = stratified_folds(train.labels(), 5, 4);
  double f1_sum = 0.0;
  for (std::size_t f = 0; f < 5; ++f) {
    std::vector<std::size_t> fit_rows, val_rows;
    for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? val_rows : fit_rows).push_back(i);
    auto aug = resample(train.subset(fit_rows), {ResampleMethod::smote, 5, derive_seed(4, 1000 + f)});
    auto model = fit(grid.models[0], aug.dataset);
    auto report = evaluate(model, train.subset(val_rows), 0.5);
    EXPECT_EQ(cell.per_fold[f].f1_false, report.failing().f1);
    f1_sum += report.failing().f1;
  }
  EXPECT_DOUBLE_EQ(cell.mean.f1_false, f1_sum / 5.0);
}

TEST(GridSearch, SeedOnlyDifferenceIsInvisibleForLogreg) {
  auto train = cohort_train(22);
  auto grid = small_grid(5);
  auto a = grid_search(grid, train);
  grid.models[0].seed = 999;
  auto b = grid_search(grid, train);
  EXPECT_EQ(a.ranked[0].mean.f1_false, b.ranked[0].mean.f1_false);
  EXPECT_EQ(a.ranked[0].mean.auc, b.ranked[0].mean.auc);
}

TEST(GridSearch, DeterministicAndAuditClean) {
  auto train = cohort_train(23);
  GridSpec grid;
  grid.resamplers = {{ResampleMethod::smote, 3}, {ResampleMethod::adasyn, 5}};
  grid.models = {ModelSpec::from_parameters(ModelKind::logreg, {{"C", "0.1"}}),
                 ModelSpec::from_parameters(ModelKind::logreg, {{"C", "1"}})};
  grid.thresholds = {0.4, 0.5, 0.6};
  grid.seed = 6;
  auto a = grid_search(grid, train);
  auto b = grid_search(grid, train);
  EXPECT_EQ(grid_result_to_csv(a), grid_result_to_csv(b));
  ASSERT_EQ(a.ranked.size(), 12u);
  EXPECT_TRUE(a.audit.passed);
  EXPECT_EQ(a.audit.synthetic_rows_in_validation, 0u);
  EXPECT_EQ(a.audit.validation_rows_checked, train.n_rows());
  EXPECT_GT(a.audit.synthetic_rows_generated, 0u);
  std::set<std::size_t> orders;
  for (const auto& c : a.ranked) orders.insert(c.grid_order);
  EXPECT_EQ(orders.size(), 12u);
}

TEST(GridSearch, RankingIsSortedBySelectionMetric) {
  auto train = cohort_train(24);
  GridSpec grid;
  grid.resamplers = {{ResampleMethod::smote, 5}};
  grid.models = {ModelSpec::from_parameters(ModelKind::logreg, {{"C", "0.01"}}),
                 ModelSpec::from_parameters(ModelKind::logreg, {{"C", "1"}})};
  grid.thresholds = GridSpec::threshold_range(30, 70, 10);
  grid.seed = 7;
  for (auto metric : {SelectionMetric::f1_false, SelectionMetric::recall_false}) {
    grid.metric = metric;
    auto result = grid_search(grid, train);
    for (std::size_t i = 1; i < result.ranked.size(); ++i) {
      const auto& prev = result.ranked[i - 1].mean;
      const auto& cur = result.ranked[i].mean;
      if (metric == SelectionMetric::f1_false) ASSERT_GE(prev.f1_false, cur.f1_false);
      else ASSERT_GE(prev.recall_false, cur.recall_false);
    }
  }
}

TEST(GridSearch, InfeasibleResamplerIsMarkedAndRankedLast) {
  auto train = cohort_train(25);
  GridSpec grid = small_grid(8);
  grid.resamplers.push_back({ResampleMethod::smote, 40});  // minority per fold is ~36 rows
  auto result = grid_search(grid, train);
  ASSERT_EQ(result.ranked.size(), 2u);
  EXPECT_TRUE(result.ranked[0].feasible);
  EXPECT_FALSE(result.ranked[1].feasible);
  EXPECT_NE(result.ranked[1].infeasible_reason.find("k_neighbors"), std::string::npos)
      << result.ranked[1].infeasible_reason;
  EXPECT_NE(grid_result_to_csv(result).find(",false,"), std::string::npos);
}

TEST(GridSearch, RejectsResampledInputAndBadThresholds) {
  auto train = cohort_train(26);
  auto augmented = resample(train, {ResampleMethod::smote, 5, 1}).dataset;
  EXPECT_THROW(grid_search(small_grid(1), augmented), InvalidArgument);
  auto grid = small_grid(1);
  grid.thresholds = {0.0};
  EXPECT_THROW(grid_search(grid, train), InvalidArgument);
}

}  // namespace
}  // namespace atrisk
