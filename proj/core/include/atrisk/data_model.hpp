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
#include <string>
#include <utility>
#include <vector>

#include "atrisk/matrix.hpp"

namespace atrisk {

struct TaskId {
  std::string name;
  int week = 1;

  friend bool operator==(const TaskId&, const TaskId&) = default;
};

/// Ordered set of formative tasks. Tasks are kept sorted by (week, name) so
/// that the columns of an earlier interval always form a prefix of the
/// columns of a later one.
class TaskManifest {
 public:
  TaskManifest() = default;
  explicit TaskManifest(std::vector<TaskId> tasks);

  const std::vector<TaskId>& tasks() const noexcept { return tasks_; }
  std::size_t size() const noexcept { return tasks_.size(); }

  bool contains(const std::string& name) const;
  /// Number of tasks with week <= max_week.
  std::size_t count_through_week(int max_week) const;

 private:
  std::vector<TaskId> tasks_;
};

TaskManifest load_manifest(const std::filesystem::path& path);
std::string manifest_to_csv(const TaskManifest& manifest);

struct StudentRecord {
  std::string student_id;
  std::string cohort;
  std::vector<std::string> right_answers;
  std::vector<std::string> wrong_answers;
  bool passed = false;

  friend bool operator==(const StudentRecord&, const StudentRecord&) = default;
};

/// Checks the per-record invariants (disjoint lists, known task names, unique
/// ids within a cohort). Throws InvalidArgument on the first violation.
void validate_records(const std::vector<StudentRecord>& records, const TaskManifest& manifest);

/// Reads a cohort CSV (`student_id,cohort,passed,right_answers,wrong_answers`).
std::vector<StudentRecord> load_cohort(const std::filesystem::path& path, const TaskManifest& manifest);
std::vector<StudentRecord> parse_cohort(const std::string& text, const TaskManifest& manifest);
std::string cohort_to_csv(const std::vector<StudentRecord>& records);

/// Feature matrix with boolean labels (true = passed) and synthetic-row flags.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(Matrix features, std::vector<bool> labels, std::vector<std::string> feature_names,
                 std::vector<bool> synthetic_flags = {});

  const Matrix& features() const noexcept { return features_; }
  const std::vector<bool>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<bool>& synthetic_flags() const noexcept { return synthetic_; }

  std::size_t n_rows() const noexcept { return features_.rows(); }
  std::size_t n_features() const noexcept { return features_.cols(); }
  std::size_t count(bool label) const;
  std::size_t synthetic_count() const;
  bool has_synthetic() const { return synthetic_count() > 0; }

  LabeledDataset subset(std::span<const std::size_t> indices) const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

 private:
  Matrix features_;
  std::vector<bool> labels_;
  std::vector<std::string> feature_names_;
  std::vector<bool> synthetic_;
};

/// One-hot encodes the tasks of weeks 1..max_week: 1 iff the task is in
/// right_answers, 0 otherwise.
LabeledDataset encode(const std::vector<StudentRecord>& records, const TaskManifest& manifest, int max_week);

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct TrainTestSplit {
  LabeledDataset train;
  LabeledDataset test;
  std::vector<std::size_t> train_rows;  // indices into the input, ascending
  std::vector<std::size_t> test_rows;
};

/// Per-class train counts for a stratified split of `n_false`/`n_true` rows.
/// Each class gets floor(f * n_c); the rows left to reach floor(f * n) go to
/// the classes with the largest fractional remainder, larger class first.
std::pair<std::size_t, std::size_t> stratified_train_counts(std::size_t n_false, std::size_t n_true,
                                                            double train_fraction);

TrainTestSplit split(const LabeledDataset& data, const SplitSpec& spec);

/// Dataset CSV: feature columns by name, then `label` (true/false) and `synthetic` (0/1).
std::string dataset_to_csv(const LabeledDataset& data);
LabeledDataset parse_dataset(const std::string& text);
LabeledDataset load_dataset(const std::filesystem::path& path);

}  // namespace atrisk
