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
#include <optional>
#include <string>
#include <vector>

#include "atrisk/classifiers.hpp"
#include "atrisk/data_model.hpp"
#include "atrisk/evaluation.hpp"
#include "atrisk/resampling.hpp"

namespace atrisk {

enum class SelectionMetric { f1_false, recall_false };

struct ResampleChoice {
  ResampleMethod method = ResampleMethod::smote;
  std::size_t k_neighbors = 5;
};

struct GridSpec {
  std::vector<ResampleChoice> resamplers;
  std::vector<ModelSpec> models;
  std::vector<double> thresholds;
  SelectionMetric metric = SelectionMetric::f1_false;
  std::size_t folds = 5;
  std::uint64_t seed = 0;

  /// SMOTE k in {3,5,7}; logreg l2 and elasticnet (l1_ratio 0, 0.5, 1) at C in
  /// {0.01, 0.1, 1, 10}; thresholds 0.30..0.70 step 0.05.
  static GridSpec standard(std::uint64_t seed = 0);
  static std::vector<double> threshold_range(int from_percent, int to_percent, int step_percent);
};

struct CellMetrics {
  double precision_false = 0.0;
  double recall_false = 0.0;
  double f1_false = 0.0;
  double accuracy = 0.0;
  double auc = 0.0;
};

struct GridCell {
  ResampleChoice resampler;
  ModelSpec model;
  double threshold = 0.5;
  bool feasible = true;
  std::string infeasible_reason;
  CellMetrics mean;                   // mean over folds
  std::vector<CellMetrics> per_fold;
  std::size_t grid_order = 0;         // position in enumeration order
};

struct LeakageAudit {
  std::size_t folds = 0;
  std::size_t validation_rows_checked = 0;
  std::size_t synthetic_rows_in_validation = 0;
  std::size_t synthetic_rows_generated = 0;
  /// Every validation row index came from the real (input) training set.
  bool passed = true;
};

struct GridResult {
  std::vector<GridCell> ranked;  // best first, infeasible cells last
  LeakageAudit audit;
};

/// Stratified fold index per row (0..folds-1), deterministic given seed.
std::vector<std::size_t> stratified_folds(const std::vector<bool>& labels, std::size_t folds, std::uint64_t seed);

/// Cross-validated grid search with resampling fitted inside each training fold.
GridResult grid_search(const GridSpec& grid, const LabeledDataset& train);

std::string grid_result_to_csv(const GridResult& result);

}  // namespace atrisk
