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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atrisk/classifiers.hpp"
#include "atrisk/cohortsim.hpp"
#include "atrisk/data_model.hpp"
#include "atrisk/error.hpp"
#include "atrisk/grid_search.hpp"
#include "atrisk/resampling.hpp"

namespace atrisk::app {

/// Offsets added to the root seed for each stage.
namespace seed_offset {
inline constexpr std::uint64_t simulate = 0;
inline constexpr std::uint64_t split = 1;
inline constexpr std::uint64_t resample = 2;
inline constexpr std::uint64_t train = 3;
inline constexpr std::uint64_t tune = 4;
}  // namespace seed_offset

struct TuneSettings {
  bool enabled = true;
  std::size_t folds = 5;
  SelectionMetric metric = SelectionMetric::f1_false;
  std::vector<std::size_t> k_neighbors = {3, 5, 7};
  int threshold_from = 30;  // percent
  int threshold_to = 70;
  int threshold_step = 5;
};

struct RunConfig {
  std::uint64_t seed = 42;
  std::filesystem::path out = "atrisk-out";
  std::vector<int> intervals = {3, 6, 9};
  /// Interval used by single-stage subcommands.
  int interval = 3;

  /// When both are set the pipeline ingests them instead of simulating.
  std::optional<std::filesystem::path> cohort;
  std::optional<std::filesystem::path> manifest;

  SimConfig sim;
  SplitSpec split;
  ResampleMethod method = ResampleMethod::smote;
  std::size_t k_neighbors = 5;
  ModelSpec model = ModelSpec::defaults(ModelKind::logreg);
  double threshold = 0.5;
  TuneSettings tune;
  /// Fit PCA on real plus synthetic rows (true) or on real rows only.
  bool pca_union = true;

  std::uint64_t stage_seed(std::uint64_t offset) const { return seed + offset; }
};

/// Invalid key or value; the message carries the `section.key` path.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Applies one `section.key = value` assignment.
void apply_setting(RunConfig& config, const std::string& path, const std::string& value);

/// Parses `[section]` headers and `key = value` lines; `#` and `;` start comments.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Validates cross-field constraints and that input paths exist.
void validate(const RunConfig& config);

/// Every effective setting as `section.key -> value`, sorted.
std::map<std::string, std::string> describe(const RunConfig& config);

}  // namespace atrisk::app
