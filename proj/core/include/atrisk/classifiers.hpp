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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "atrisk/data_model.hpp"
#include "atrisk/logistic.hpp"
#include "atrisk/matrix.hpp"
#include "atrisk/naive_bayes.hpp"
#include "atrisk/svm.hpp"
#include "atrisk/tree.hpp"

namespace atrisk {

enum class ModelKind { logreg, naive_bayes, decision_tree, random_forest, knn, svm_linear, svm_rbf };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& text);

enum class Penalty { l2, elasticnet };

struct LogRegParams {
  Penalty penalty = Penalty::l2;
  double C = 1.0;
  /// Used only with the elasticnet penalty.
  double l1_ratio = 0.5;
  double tolerance = 1e-8;
  int max_iterations = 10000;
};

struct NaiveBayesParams {
  double alpha = 1.0;
  double binarize = 0.5;
};

struct TreeParams {
  int max_depth = 0;
  int min_samples_split = 2;
  int max_features = 0;
};

struct ForestParams {
  int n_trees = 100;
  int max_depth = 0;
  int min_samples_split = 2;
  int max_features = 0;  // 0 = floor(sqrt(d))
  bool bootstrap = true;
};

struct KnnParams {
  int k = 5;
};

enum class GammaMode { scale, value };

struct SvmParams {
  double C = 1.0;
  GammaMode gamma_mode = GammaMode::scale;
  double gamma = 0.0;
  double tolerance = 1e-3;
  int max_iterations = 100000;
};

using Hyperparameters = std::variant<LogRegParams, NaiveBayesParams, TreeParams, ForestParams, KnnParams, SvmParams>;

struct ModelSpec {
  ModelKind kind = ModelKind::logreg;
  Hyperparameters params = LogRegParams{};
  std::uint64_t seed = 0;

  /// Defaults mirror the usual library defaults for each kind.
  static ModelSpec defaults(ModelKind kind);
  /// Builds a spec from text key/value pairs; unknown keys throw InvalidArgument.
  static ModelSpec from_parameters(ModelKind kind, const std::map<std::string, std::string>& parameters);

  std::map<std::string, std::string> parameters() const;
  /// Regularization C for logreg/svm kinds, 0 otherwise.
  double regularization_c() const;
};

struct KnnState {
  Matrix rows;
  std::vector<bool> labels;
  std::size_t k = 5;
};

using ModelState = std::variant<LogisticState, NaiveBayesState, TreeState, ForestState, KnnState, SvmState>;

struct TrainedModel {
  ModelSpec spec;
  std::size_t n_features = 0;
  bool converged = true;
  ModelState state;
};

struct ClassProbabilities {
  double p_false = 0.5;
  double p_true = 0.5;
};

TrainedModel fit(const ModelSpec& spec, const LabeledDataset& train);

std::vector<ClassProbabilities> predict_proba(const TrainedModel& model, const Matrix& rows);

/// Versioned JSON document; round trips preserve predictions bit for bit.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

}  // namespace atrisk
