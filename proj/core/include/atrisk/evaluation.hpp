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

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "atrisk/classifiers.hpp"
#include "atrisk/data_model.hpp"

namespace atrisk {

/// counts[actual][predicted], index 0 = false (failing), 1 = true (passing).
struct ConfusionMatrix {
  std::array<std::array<std::size_t, 2>, 2> counts{};

  std::size_t total() const;
  std::size_t actual(bool label) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  ConfusionMatrix confusion;
  std::array<ClassMetrics, 2> per_class{};  // [0] = failing, [1] = passing
  double accuracy = 0.0;
  /// Failing class as positive, P(false) as score.
  double auc = 0.5;
  double threshold = 0.5;
  /// Some precision/recall/F1 hit 0/0 and was reported as 0.
  bool undefined_metric = false;
  /// The test set lacked one of the classes; auc is reported as 0.5.
  bool auc_undefined = false;

  const ClassMetrics& failing() const { return per_class[0]; }
};

/// Predicted failing iff p_false >= threshold.
ConfusionMatrix confusion_at(std::span<const double> p_false, const std::vector<bool>& labels, double threshold);

/// Precision, recall, F1 and accuracy from counts (0/0 -> 0).
EvalReport metrics_from_confusion(const ConfusionMatrix& confusion);

/// Mann-Whitney AUC with ties counted one half; `positive` marks failing rows.
double auc_mann_whitney(std::span<const double> scores, const std::vector<bool>& positive);

/// Scores already computed; labels true = passed.
EvalReport report_from_scores(std::span<const double> p_false, const std::vector<bool>& labels, double threshold);

EvalReport evaluate(const TrainedModel& model, const LabeledDataset& test, double threshold);

std::vector<EvalReport> sweep_thresholds(const TrainedModel& model, const LabeledDataset& test,
                                         std::span<const double> thresholds);

std::string report_to_json(const EvalReport& report);

struct SummaryRow {
  std::string interval;
  std::string model;
  EvalReport report;
  std::size_t n_features = 0;
};

/// `interval,model,precision_false,recall_false,f1_false,accuracy,auc,threshold,n_features`
std::string summary_to_csv(const std::vector<SummaryRow>& rows);

}  // namespace atrisk
