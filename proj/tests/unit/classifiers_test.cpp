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

#include "atrisk/classifiers.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "atrisk/cohortsim.hpp"
#include "atrisk/error.hpp"
#include "test_util.hpp"

namespace atrisk {
namespace {

const std::vector<ModelKind> kAllKinds = {ModelKind::logreg,        ModelKind::naive_bayes, ModelKind::decision_tree,
                                          ModelKind::random_forest, ModelKind::knn,         ModelKind::svm_linear,
                                          ModelKind::svm_rbf};

LabeledDataset small_cohort(std::uint64_t seed) {
  SimConfig config;
  config.n_students = 120;
  config.seed = seed;
  auto cohort = simulate(config);
  return encode(cohort.records, cohort.manifest, 3);
}

ModelSpec spec_for(ModelKind kind, std::map<std::string, std::string> params = {}) {
  if (kind == ModelKind::random_forest && !params.count("n_trees")) params["n_trees"] = "25";
  return ModelSpec::from_parameters(kind, params);
}

TEST(ModelSpec, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(ModelSpec::from_parameters(ModelKind::logreg, {{"gamma", "1"}}), InvalidArgument);
  EXPECT_THROW(ModelSpec::from_parameters(ModelKind::svm_linear, {{"gamma", "1"}}), InvalidArgument);
  EXPECT_THROW(ModelSpec::from_parameters(ModelKind::logreg, {{"C", "-1"}}), InvalidArgument);
  EXPECT_THROW(ModelSpec::from_parameters(ModelKind::logreg, {{"penalty", "l1"}}), InvalidArgument);
  EXPECT_THROW(ModelSpec::from_parameters(ModelKind::knn, {{"k", "five"}}), InvalidArgument);
  auto spec = ModelSpec::from_parameters(ModelKind::logreg, {{"penalty", "elasticnet"}, {"C", "0.01"}, {"l1_ratio", "0.5"}});
  const auto& p = std::get<LogRegParams>(spec.params);
  EXPECT_EQ(p.penalty, Penalty::elasticnet);
  EXPECT_EQ(p.C, 0.01);
  EXPECT_EQ(p.l1_ratio, 0.5);
  EXPECT_EQ(ModelSpec::from_parameters(ModelKind::logreg, spec.parameters()).parameters(), spec.parameters());
}

TEST(ModelSpec, DefaultsFollowCommonLibraryDefaults) {
  auto lr = std::get<LogRegParams>(ModelSpec::defaults(ModelKind::logreg).params);
  EXPECT_EQ(lr.penalty, Penalty::l2);
  EXPECT_EQ(lr.C, 1.0);
  EXPECT_EQ(std::get<ForestParams>(ModelSpec::defaults(ModelKind::random_forest).params).n_trees, 100);
  EXPECT_EQ(std::get<KnnParams>(ModelSpec::defaults(ModelKind::knn).params).k, 5);
  EXPECT_EQ(std::get<SvmParams>(ModelSpec::defaults(ModelKind::svm_rbf).params).gamma_mode, GammaMode::scale);
}

TEST(PredictProba, RowsSumToOneForEveryKind) {
  auto data = small_cohort(1);
  for (auto kind : kAllKinds) {
    auto model = fit(spec_for(kind), data);
    auto probs = predict_proba(model, data.features());
    ASSERT_EQ(probs.size(), data.n_rows());
    for (const auto& p : probs) {
      ASSERT_GE(p.p_false, 0.0) << to_string(kind);
      ASSERT_LE(p.p_false, 1.0) << to_string(kind);
      ASSERT_NEAR(p.p_false + p.p_true, 1.0, 1e-9) << to_string(kind);
    }
  }
}

TEST(PredictProba, DimensionMismatchNamesBothSizes) {
  auto data = small_cohort(2);
  auto model = fit(spec_for(ModelKind::logreg), data);
  try {
    predict_proba(model, Matrix(1, 3));
    FAIL() << "expected rejection";
  } catch (const InvalidArgument& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("43"), std::string::npos) << msg;
    EXPECT_NE(msg.find("3"), std::string::npos) << msg;
  }
}

TEST(PredictProba, ZeroLogisticModelIsHalf) {
  TrainedModel model;
  model.spec = ModelSpec::defaults(ModelKind::logreg);
  model.n_features = 3;
  model.state = LogisticState{{0, 0, 0}, 0.0, 0};
  for (const auto& p : predict_proba(model, Matrix{{1, 0, 1}, {0, 0, 0}, {1, 1, 1}})) {
    EXPECT_EQ(p.p_false, 0.5);
    EXPECT_EQ(p.p_true, 0.5);
  }
}

TEST(Fit, LogisticL1KillLimit) {
  Rng rng(4);
  Matrix x = testing::random_binary(rng, 40, 6);
  std::vector<bool> labels(40);
  for (std::size_t i = 0; i < 40; ++i) labels[i] = i % 2;
  LabeledDataset data(x, labels, testing::column_names(6));
  auto model = fit(spec_for(ModelKind::logreg, {{"penalty", "elasticnet"}, {"l1_ratio", "1"}, {"C", "1e-5"}}), data);
  for (double w : std::get<LogisticState>(model.state).weights) EXPECT_EQ(w, 0.0);
  for (const auto& p : predict_proba(model, x)) EXPECT_EQ(p.p_false, 0.5);
}

TEST(Fit, LogisticPenaltyShrinksWeight) {
  LabeledDataset data(Matrix{{0}, {0}, {1}, {1}}, {false, false, true, true}, {"a"});
  auto strong = fit(spec_for(ModelKind::logreg, {{"C", "0.01"}}), data);
  auto weak = fit(spec_for(ModelKind::logreg, {{"C", "1"}}), data);
  EXPECT_LT(std::abs(std::get<LogisticState>(strong.state).weights[0]),
            std::abs(std::get<LogisticState>(weak.state).weights[0]));
}

TEST(Fit, KnnUnanimousVote) {
  Matrix x(0, 2);
  std::vector<bool> labels;
  for (int i = 0; i < 5; ++i) {
    x.append_row(std::vector<double>{0, 0});
    labels.push_back(false);
  }
  for (int i = 0; i < 5; ++i) {
    x.append_row(std::vector<double>{1, 1});
    labels.push_back(true);
  }
  auto model = fit(spec_for(ModelKind::knn), LabeledDataset(x, labels, {"a", "b"}));
  auto p = predict_proba(model, Matrix{{0, 0}, {1, 1}});
  EXPECT_EQ(p[0].p_false, 1.0);
  EXPECT_EQ(p[0].p_true, 0.0);
  EXPECT_EQ(p[1].p_true, 1.0);
}

TEST(Fit, NaiveBayesClosedFormPosterior) {
  // Feature 0 is uninformative; features 1..3 equal the label. Query (0,1,1,1).
  Matrix x{{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 1, 1}, {1, 1, 1, 1}};
  LabeledDataset data(x, {false, false, true, true}, testing::column_names(4));
  auto model = fit(spec_for(ModelKind::naive_bayes), data);
  // Add-one smoothing over 2 rows per class: P(x_j=1|true) = 3/4, P(x_j=1|false) = 1/4
  // for j = 1..3 and 1/2 for j = 0; equal priors. Posterior = 27 / (27 + 1).
  const double expected = (0.5 * 0.5 * 0.75 * 0.75 * 0.75) /
                          (0.5 * 0.5 * 0.75 * 0.75 * 0.75 + 0.5 * 0.5 * 0.25 * 0.25 * 0.25);
  EXPECT_DOUBLE_EQ(expected, 27.0 / 28.0);
  auto p = predict_proba(model, Matrix{{0, 1, 1, 1}});
  EXPECT_NEAR(p[0].p_true, expected, 1e-12);
  EXPECT_GT(p[0].p_true, 0.9);
}

TEST(Fit, NaiveBayesThresholdsFractionalInputs) {
  Matrix x{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  LabeledDataset data(x, {false, false, true, true}, {"a", "b"});
  auto model = fit(spec_for(ModelKind::naive_bayes), data);
  auto p = predict_proba(model, Matrix{{0.7, 0.2}, {1.0, 0.0}});
  EXPECT_EQ(p[0].p_true, p[1].p_true);
}

LabeledDataset without_conflicts(Rng& rng, std::size_t n, std::size_t d) {
  Matrix x(0, d);
  std::vector<bool> labels;
  std::set<std::vector<double>> seen;
  while (x.rows() < n) {
    std::vector<double> row(d);
    for (auto& v : row) v = rng.uniform() < 0.5 ? 1.0 : 0.0;
    if (!seen.insert(row).second) continue;
    x.append_row(row);
    labels.push_back(rng.uniform() < 0.7);
  }
  return LabeledDataset(x, labels, testing::column_names(d));
}

TEST(Fit, FullTreeIsPureOnTrainingRows) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    auto data = without_conflicts(rng, 60, 8);
    auto model = fit(spec_for(ModelKind::decision_tree), data);
    auto probs = predict_proba(model, data.features());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
      EXPECT_EQ(probs[i].p_true, data.labels()[i] ? 1.0 : 0.0);
    }
  }
}

TEST(Fit, TreeSolvesXor) {
  LabeledDataset data(Matrix{{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {false, false, true, true}, {"a", "b"});
  auto model = fit(spec_for(ModelKind::decision_tree), data);
  auto p = predict_proba(model, data.features());
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(p[i].p_true, data.labels()[i] ? 1.0 : 0.0);
}

TEST(Fit, TreeToleratesSingleClass) {
  LabeledDataset data(Matrix{{0}, {1}}, {true, true}, {"a"});
  auto model = fit(spec_for(ModelKind::decision_tree), data);
  EXPECT_EQ(predict_proba(model, Matrix{{0.5}})[0].p_true, 1.0);
  EXPECT_NO_THROW(fit(spec_for(ModelKind::random_forest), data));
  EXPECT_THROW(fit(spec_for(ModelKind::logreg), data), InvalidArgument);
  EXPECT_THROW(fit(spec_for(ModelKind::svm_rbf), data), InvalidArgument);
}

TEST(Fit, ForestIsMeanOfTrees) {
  auto data = small_cohort(3);
  auto model = fit(spec_for(ModelKind::random_forest, {{"n_trees", "30"}, {"seed", "5"}}), data);
  const auto& forest = std::get<ForestState>(model.state);
  ASSERT_EQ(forest.trees.size(), 30u);
  auto probs = predict_proba(model, data.features());
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    double sum = 0.0;
    for (const auto& tree : forest.trees) sum += tree_p_true(tree, data.features().row(i));
    EXPECT_EQ(probs[i].p_true, sum / 30.0);
  }
}

TEST(Fit, RbfSvmSeparatesXor) {
  LabeledDataset data(Matrix{{0, 0}, {1, 1}, {0, 1}, {1, 0}}, {false, false, true, true}, {"a", "b"});
  auto model = fit(spec_for(ModelKind::svm_rbf), data);
  EXPECT_TRUE(model.converged);
  EXPECT_DOUBLE_EQ(std::get<SvmState>(model.state).kernel.gamma, 2.0);
  auto p = predict_proba(model, data.features());
  for (std::size_t i = 0; i < 4; ++i) {
    bool predicted_false = p[i].p_false >= 0.5;
    EXPECT_EQ(predicted_false, !data.labels()[i]) << i;
  }
}

TEST(Svm, DefaultGammaUsesMeanFeatureVariance) {
  // Column variances 0.25 and 0 (mean 0.125); pooled entries give 0.1875.
  Matrix x{{0, 1}, {1, 1}, {0, 1}, {1, 1}};
  EXPECT_DOUBLE_EQ(default_gamma(x), 1.0 / (2 * 0.125));
  EXPECT_EQ(default_gamma(Matrix(3, 2, 1.0)), 1.0);
}

TEST(Fit, LinearSvmSeparatesLinearData) {
  LabeledDataset data(Matrix{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0, 0.}, {1, 1.}},
                      {false, false, false, true, false, true}, {"a", "b"});
  auto model = fit(spec_for(ModelKind::svm_linear, {{"C", "10"}}), data);
  auto p = predict_proba(model, data.features());
  for (std::size_t i = 0; i < data.n_rows(); ++i) EXPECT_EQ(p[i].p_false < 0.5, data.labels()[i]) << i;
}

TEST(Fit, DeterministicForEveryKind) {
  auto data = small_cohort(5);
  for (auto kind : kAllKinds) {
    auto a = fit(spec_for(kind, {{"seed", "3"}}), data);
    auto b = fit(spec_for(kind, {{"seed", "3"}}), data);
    EXPECT_EQ(model_to_json(a), model_to_json(b)) << to_string(kind);
  }
}

TEST(ModelJson, RoundTripPreservesPredictionsBitForBit) {
  auto data = small_cohort(6);
  for (auto kind : kAllKinds) {
    auto model = fit(spec_for(kind, {{"seed", "8"}}), data);
    auto text = model_to_json(model);
    auto loaded = model_from_json(text);
    EXPECT_EQ(model_to_json(loaded), text) << to_string(kind);
    auto a = predict_proba(model, data.features());
    auto b = predict_proba(loaded, data.features());
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_EQ(a[i].p_false, b[i].p_false) << to_string(kind);
      ASSERT_EQ(a[i].p_true, b[i].p_true) << to_string(kind);
    }
  }
}

TEST(ModelJson, RejectsForeignDocuments) {
  EXPECT_THROW(model_from_json("{}"), ParseError);
  EXPECT_THROW(model_from_json("not json"), ParseError);
  auto data = small_cohort(7);
  auto text = model_to_json(fit(spec_for(ModelKind::logreg), data));
  auto bumped = text;
  bumped.replace(bumped.find("\"version\": 1"), 12, "\"version\": 9");
  EXPECT_THROW(model_from_json(bumped), ParseError);
}

}  // namespace
}  // namespace atrisk
