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

#include <algorithm>
#include <optional>

#include <fmt/format.h>

#include "atrisk/csv.hpp"
#include "atrisk/error.hpp"
#include "atrisk/random.hpp"

namespace atrisk {

std::vector<double> GridSpec::threshold_range(int from_percent, int to_percent, int step_percent) {
  if (step_percent <= 0) throw InvalidArgument("threshold step must be positive");
  std::vector<double> out;
  for (int p = from_percent; p <= to_percent; p += step_percent) out.push_back(p / 100.0);
  return out;
}

GridSpec GridSpec::standard(std::uint64_t seed) {
  GridSpec grid;
  for (std::size_t k : {3, 5, 7}) grid.resamplers.push_back({ResampleMethod::smote, k});
  for (double c : {0.01, 0.1, 1.0, 10.0}) {
    ModelSpec spec = ModelSpec::defaults(ModelKind::logreg);
    auto& p = std::get<LogRegParams>(spec.params);
    p.penalty = Penalty::l2;
    p.C = c;
    p.l1_ratio = 0.0;
    grid.models.push_back(spec);
  }
  for (double l1 : {0.0, 0.5, 1.0}) {
    for (double c : {0.01, 0.1, 1.0, 10.0}) {
      ModelSpec spec = ModelSpec::defaults(ModelKind::logreg);
      auto& p = std::get<LogRegParams>(spec.params);
      p.penalty = Penalty::elasticnet;
      p.C = c;
      p.l1_ratio = l1;
      grid.models.push_back(spec);
    }
  }
  grid.thresholds = threshold_range(30, 70, 5);
  grid.seed = seed;
  return grid;
}

std::vector<std::size_t> stratified_folds(const std::vector<bool>& labels, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
  Rng rng(seed);
  std::vector<std::size_t> assignment(labels.size(), 0);
  std::size_t offset = 0;
  for (bool label : {false, true}) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) rows.push_back(i);
    if (rows.size() < folds) {
      throw InvalidArgument(fmt::format("class '{}' has {} rows, fewer than {} folds", label ? "true" : "false",
                                        rows.size(), folds));
    }
    rng.shuffle(std::span<std::size_t>(rows));
    for (std::size_t p = 0; p < rows.size(); ++p) assignment[rows[p]] = (p + offset) % folds;
    offset = (offset + rows.size()) % folds;
  }
  return assignment;
}

namespace {

double selection_value(const CellMetrics& m, SelectionMetric metric) {
  return metric == SelectionMetric::f1_false ? m.f1_false : m.recall_false;
}

CellMetrics cell_metrics(const EvalReport& r) {
  return {r.failing().precision, r.failing().recall, r.failing().f1, r.accuracy, r.auc};
}

CellMetrics mean_of(const std::vector<CellMetrics>& folds) {
  CellMetrics m;
  for (const auto& f : folds) {
    m.precision_false += f.precision_false;
    m.recall_false += f.recall_false;
    m.f1_false += f.f1_false;
    m.accuracy += f.accuracy;
    m.auc += f.auc;
  }
  const double n = static_cast<double>(folds.size());
  m.precision_false /= n;
  m.recall_false /= n;
  m.f1_false /= n;
  m.accuracy /= n;
  m.auc /= n;
  return m;
}

}  // namespace

GridResult grid_search(const GridSpec& grid, const LabeledDataset& train) {
  if (grid.resamplers.empty() || grid.models.empty() || grid.thresholds.empty()) {
    throw InvalidArgument("grid search needs at least one resampler, model and threshold");
  }
  for (double t : grid.thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw InvalidArgument(fmt::format("grid threshold {} outside (0,1)", t));
  }
  if (train.has_synthetic()) {
    throw InvalidArgument("grid search takes the real training set; resampling happens inside each fold");
  }
  const auto assignment = stratified_folds(train.labels(), grid.folds, grid.seed);
  std::vector<std::vector<std::size_t>> fit_rows(grid.folds), val_rows(grid.folds);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    for (std::size_t f = 0; f < grid.folds; ++f) (assignment[i] == f ? val_rows : fit_rows)[f].push_back(i);
  }

  GridResult result;
  result.audit.folds = grid.folds;
  std::vector<LabeledDataset> validation;
  for (std::size_t f = 0; f < grid.folds; ++f) {
    validation.push_back(train.subset(val_rows[f]));
    result.audit.validation_rows_checked += validation.back().n_rows();
    result.audit.synthetic_rows_in_validation += validation.back().synthetic_count();
  }

  std::size_t order = 0;
  std::vector<GridCell> cells;
  for (const auto& choice : grid.resamplers) {
    // One augmented training set per fold, shared by every model of this resampler.
    std::vector<std::optional<LabeledDataset>> augmented(grid.folds);
    std::string infeasible;
    for (std::size_t f = 0; f < grid.folds && infeasible.empty(); ++f) {
      try {
        auto fold_train = train.subset(fit_rows[f]);
        ResampleConfig config{choice.method, choice.k_neighbors, derive_seed(grid.seed, 1000 + f)};
        auto resampled = resample(fold_train, config);
        result.audit.synthetic_rows_generated += resampled.provenance.size();
        augmented[f] = std::move(resampled.dataset);
      } catch (const InvalidArgument& e) {
        infeasible = fmt::format("fold {}: {}", f, e.what());
      }
    }

    for (const auto& model : grid.models) {
      std::vector<std::vector<CellMetrics>> per_threshold(grid.thresholds.size());
      std::string reason = infeasible;
      for (std::size_t f = 0; f < grid.folds && reason.empty(); ++f) {
        try {
          auto trained = fit(model, *augmented[f]);
          auto reports = sweep_thresholds(trained, validation[f], grid.thresholds);
          for (std::size_t t = 0; t < reports.size(); ++t) per_threshold[t].push_back(cell_metrics(reports[t]));
        } catch (const InvalidArgument& e) {
          reason = fmt::format("fold {}: {}", f, e.what());
        }
      }
      for (std::size_t t = 0; t < grid.thresholds.size(); ++t) {
        GridCell cell;
        cell.resampler = choice;
        cell.model = model;
        cell.threshold = grid.thresholds[t];
        cell.grid_order = order++;
        if (reason.empty()) {
          cell.per_fold = std::move(per_threshold[t]);
          cell.mean = mean_of(cell.per_fold);
        } else {
          cell.feasible = false;
          cell.infeasible_reason = reason;
        }
        cells.push_back(std::move(cell));
      }
    }
  }

  std::stable_sort(cells.begin(), cells.end(), [&](const GridCell& a, const GridCell& b) {
    if (a.feasible != b.feasible) return a.feasible;
    const double sa = selection_value(a.mean, grid.metric), sb = selection_value(b.mean, grid.metric);
    if (sa != sb) return sa > sb;
    if (a.mean.recall_false != b.mean.recall_false) return a.mean.recall_false > b.mean.recall_false;
    const double ca = a.model.regularization_c(), cb = b.model.regularization_c();
    if (ca != cb) return ca < cb;
    if (a.threshold != b.threshold) return a.threshold < b.threshold;
    return a.grid_order < b.grid_order;
  });
  result.ranked = std::move(cells);
  result.audit.passed = result.audit.synthetic_rows_in_validation == 0;
  return result;
}

namespace {

std::string describe(const ModelSpec& spec) {
  std::string out;
  for (const auto& [k, v] : spec.parameters()) {
    if (k == "tolerance" || k == "max_iterations" || k == "seed") continue;
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

}  // namespace

std::string grid_result_to_csv(const GridResult& result) {
  std::string out =
      "rank,method,k_neighbors,model,parameters,threshold,feasible,precision_false,recall_false,f1_false,accuracy,auc\n";
  std::size_t rank = 1;
  for (const auto& c : result.ranked) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", rank++, to_string(c.resampler.method),
                       c.resampler.k_neighbors, to_string(c.model.kind), describe(c.model),
                       csv::format_double(c.threshold), c.feasible ? "true" : "false",
                       csv::format_double(c.mean.precision_false), csv::format_double(c.mean.recall_false),
                       csv::format_double(c.mean.f1_false), csv::format_double(c.mean.accuracy),
                       csv::format_double(c.mean.auc));
  }
  return out;
}

}  // namespace atrisk
