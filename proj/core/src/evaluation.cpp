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

#include "atrisk/evaluation.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "atrisk/csv.hpp"
#include "atrisk/error.hpp"

namespace atrisk {

std::size_t ConfusionMatrix::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

std::size_t ConfusionMatrix::actual(bool label) const {
  const auto& row = counts[label ? 1 : 0];
  return row[0] + row[1];
}

ConfusionMatrix confusion_at(std::span<const double> p_false, const std::vector<bool>& labels, double threshold) {
  if (p_false.size() != labels.size()) throw InvalidArgument("score count does not match label count");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int predicted = p_false[i] >= threshold ? 0 : 1;
    ++cm.counts[labels[i] ? 1 : 0][static_cast<std::size_t>(predicted)];
  }
  return cm;
}

namespace {

double ratio(std::size_t num, std::size_t den, bool& undefined) {
  if (den == 0) {
    undefined = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport metrics_from_confusion(const ConfusionMatrix& cm) {
  EvalReport report;
  report.confusion = cm;
  for (std::size_t c = 0; c < 2; ++c) {
    const std::size_t other = 1 - c;
    const std::size_t tp = cm.counts[c][c];
    const std::size_t fp = cm.counts[other][c];
    const std::size_t fn = cm.counts[c][other];
    auto& m = report.per_class[c];
    m.precision = ratio(tp, tp + fp, report.undefined_metric);
    m.recall = ratio(tp, tp + fn, report.undefined_metric);
    if (m.precision + m.recall > 0.0) {
      m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
      m.f1 = 0.0;
      report.undefined_metric = true;
    }
  }
  bool unused = false;
  report.accuracy = ratio(cm.counts[0][0] + cm.counts[1][1], cm.total(), unused);
  return report;
}

double auc_mann_whitney(std::span<const double> scores, const std::vector<bool>& positive) {
  const std::size_t n = scores.size();
  if (positive.size() != n) throw InvalidArgument("score count does not match label count");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  // Sum of (1-based, tie-averaged) ranks of the positives, doubled to stay integral.
  double twice_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && scores[order[end]] == scores[order[start]]) ++end;
    const double twice_avg_rank = static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) {
      if (positive[order[k]]) {
        twice_rank_sum += twice_avg_rank;
        ++n_pos;
      }
    }
    start = end;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  // U counted in half units: 2U = 2R - n_pos (n_pos + 1)
  const double twice_u = twice_rank_sum - static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return twice_u / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

EvalReport report_from_scores(std::span<const double> p_false, const std::vector<bool>& labels, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument(fmt::format("threshold must lie strictly inside (0,1), got {}", threshold));
  }
  if (labels.empty()) throw InvalidArgument("cannot evaluate on an empty test set");
  EvalReport report = metrics_from_confusion(confusion_at(p_false, labels, threshold));
  report.threshold = threshold;
  std::vector<bool> failing(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) failing[i] = !labels[i];
  report.auc = auc_mann_whitney(p_false, failing);
  report.auc_undefined = report.confusion.actual(false) == 0 || report.confusion.actual(true) == 0;
  return report;
}

namespace {

std::vector<double> failing_scores(const TrainedModel& model, const LabeledDataset& test) {
  if (test.has_synthetic()) {
    throw TestPurityError(fmt::format(
        "test purity violated: the evaluation set contains {} synthetic rows; only real rows may be evaluated",
        test.synthetic_count()));
  }
  if (test.n_rows() == 0) throw InvalidArgument("cannot evaluate on an empty test set");
  auto probs = predict_proba(model, test.features());
  std::vector<double> scores(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) scores[i] = probs[i].p_false;
  return scores;
}

}  // namespace

EvalReport evaluate(const TrainedModel& model, const LabeledDataset& test, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument(fmt::format("threshold must lie strictly inside (0,1), got {}", threshold));
  }
  return report_from_scores(failing_scores(model, test), test.labels(), threshold);
}

std::vector<EvalReport> sweep_thresholds(const TrainedModel& model, const LabeledDataset& test,
                                         std::span<const double> thresholds) {
  for (double t : thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw InvalidArgument(fmt::format("threshold must lie strictly inside (0,1), got {}", t));
  }
  auto scores = failing_scores(model, test);
  std::vector<EvalReport> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) out.push_back(report_from_scores(scores, test.labels(), t));
  return out;
}

std::string report_to_json(const EvalReport& r) {
  using nlohmann::json;
  auto metrics = [](const ClassMetrics& m) {
    return json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
  };
  json doc = {{"threshold", r.threshold},
              {"confusion",
               {{"actual_false", {{"predicted_false", r.confusion.counts[0][0]}, {"predicted_true", r.confusion.counts[0][1]}}},
                {"actual_true", {{"predicted_false", r.confusion.counts[1][0]}, {"predicted_true", r.confusion.counts[1][1]}}}}},
              {"false", metrics(r.per_class[0])},
              {"true", metrics(r.per_class[1])},
              {"accuracy", r.accuracy},
              {"auc", r.auc},
              {"undefined_metric", r.undefined_metric},
              {"auc_undefined", r.auc_undefined}};
  return doc.dump(2) + "\n";
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "interval,model,precision_false,recall_false,f1_false,accuracy,auc,threshold,n_features\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", row.interval, row.model, csv::format_double(r.failing().precision),
                       csv::format_double(r.failing().recall), csv::format_double(r.failing().f1),
                       csv::format_double(r.accuracy), csv::format_double(r.auc), csv::format_double(r.threshold),
                       row.n_features);
  }
  return out;
}

}  // namespace atrisk
