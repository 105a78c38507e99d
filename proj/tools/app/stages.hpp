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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "atrisk/error.hpp"

namespace atrisk::app {

/// A stage input that an earlier stage should have written is absent.
class MissingArtifact : public Error {
 public:
  MissingArtifact(const std::string& stage, const std::filesystem::path& path, const std::string& producer);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

/// File names inside the output directory.
struct Layout {
  std::filesystem::path out;

  std::filesystem::path cohort() const { return out / "cohort.csv"; }
  std::filesystem::path manifest() const { return out / "manifest.csv"; }
  std::filesystem::path dataset(int week) const;
  std::filesystem::path train(int week) const;
  std::filesystem::path test(int week) const;
  std::filesystem::path resampled(int week) const;
  std::filesystem::path provenance(int week) const;
  std::filesystem::path model(int week) const;
  std::filesystem::path report(int week) const;
  std::filesystem::path grid(int week) const;
  std::filesystem::path best(int week) const;
  std::filesystem::path scatter(int week, ResampleMethod method) const;
  std::filesystem::path summary() const { return out / "summary.csv"; }
  std::filesystem::path run_manifest() const { return out / "run_manifest.json"; }
};

/// Resampler, model and threshold used by resample/train/evaluate.
struct StageSettings {
  ResampleMethod method = ResampleMethod::smote;
  std::size_t k_neighbors = 5;
  ModelSpec model;
  double threshold = 0.5;
};

StageSettings settings_from_config(const RunConfig& config);
/// Reads the tuned cell written by `tune` for this interval.
StageSettings settings_from_tuning(const RunConfig& config, int week);

using Written = std::vector<std::filesystem::path>;

Written run_simulate(const RunConfig& config);
/// Validates input.cohort/input.manifest and copies them into the output directory.
Written run_ingest(const RunConfig& config);
Written run_encode(const RunConfig& config, int week);
Written run_split(const RunConfig& config, int week);
Written run_resample(const RunConfig& config, int week, const StageSettings& settings);
Written run_train(const RunConfig& config, int week, const StageSettings& settings,
                  const std::optional<std::filesystem::path>& train_path = std::nullopt);
Written run_evaluate(const RunConfig& config, int week, const StageSettings& settings,
                     const std::optional<std::filesystem::path>& model_path = std::nullopt,
                     const std::optional<std::filesystem::path>& test_path = std::nullopt);
Written run_tune(const RunConfig& config, int week);
Written run_pca_export(const RunConfig& config, int week);
/// Collects report_w*.json of every configured interval into summary.csv.
Written run_summary(const RunConfig& config);
/// Every stage in order, then summary.csv and run_manifest.json.
Written run_pipeline(const RunConfig& config);

/// Human-readable description of a resampler + model cell, free of commas.
std::string describe_cell(const StageSettings& settings);

}  // namespace atrisk::app
