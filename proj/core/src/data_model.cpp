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

#include "atrisk/data_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "atrisk/csv.hpp"
#include "atrisk/error.hpp"
#include "atrisk/random.hpp"

namespace atrisk {

TaskManifest::TaskManifest(std::vector<TaskId> tasks) : tasks_(std::move(tasks)) {
  std::unordered_set<std::string> seen;
  for (const auto& t : tasks_) {
    if (t.name.empty()) throw InvalidArgument("task name must not be empty");
    if (t.week < 1) throw InvalidArgument(fmt::format("task '{}' has week {} (must be >= 1)", t.name, t.week));
    if (!seen.insert(t.name).second) throw InvalidArgument(fmt::format("duplicate task '{}' in manifest", t.name));
  }
  std::sort(tasks_.begin(), tasks_.end(), [](const TaskId& a, const TaskId& b) {
    return a.week != b.week ? a.week < b.week : a.name < b.name;
  });
}

bool TaskManifest::contains(const std::string& name) const {
  return std::any_of(tasks_.begin(), tasks_.end(), [&](const TaskId& t) { return t.name == name; });
}

std::size_t TaskManifest::count_through_week(int max_week) const {
  return static_cast<std::size_t>(
      std::count_if(tasks_.begin(), tasks_.end(), [&](const TaskId& t) { return t.week <= max_week; }));
}

TaskManifest load_manifest(const std::filesystem::path& path) {
  auto rows = csv::read_file(path);
  if (rows.empty() || rows.front().fields != std::vector<std::string>{"task", "week"}) {
    throw ParseError(fmt::format("{}: expected header 'task,week'", path.string()));
  }
  std::vector<TaskId> tasks;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.fields.size() != 2) {
      throw ParseError(fmt::format("{}:{}: expected 2 fields, got {}", path.string(), row.line, row.fields.size()));
    }
    try {
      tasks.push_back({row.fields[0], static_cast<int>(csv::parse_int(row.fields[1]))});
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("{}:{}: {}", path.string(), row.line, e.what()));
    }
  }
  return TaskManifest(std::move(tasks));
}

std::string manifest_to_csv(const TaskManifest& manifest) {
  std::string out = "task,week\n";
  for (const auto& t : manifest.tasks()) out += fmt::format("{},{}\n", t.name, t.week);
  return out;
}

void validate_records(const std::vector<StudentRecord>& records, const TaskManifest& manifest) {
  std::unordered_set<std::string> known;
  for (const auto& t : manifest.tasks()) known.insert(t.name);
  std::set<std::pair<std::string, std::string>> ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!ids.insert({r.cohort, r.student_id}).second) {
      throw InvalidArgument(fmt::format("record {}: duplicate student_id '{}' in cohort '{}'", i, r.student_id, r.cohort));
    }
    std::unordered_set<std::string> right(r.right_answers.begin(), r.right_answers.end());
    for (const auto* list : {&r.right_answers, &r.wrong_answers}) {
      for (const auto& name : *list) {
        if (!known.count(name)) {
          throw InvalidArgument(fmt::format("record {} ('{}'): unknown task '{}'", i, r.student_id, name));
        }
      }
    }
    for (const auto& name : r.wrong_answers) {
      if (right.count(name)) {
        throw InvalidArgument(
            fmt::format("record {} ('{}'): task '{}' listed as both right and wrong", i, r.student_id, name));
      }
    }
  }
}

namespace {

std::vector<std::string> split_list(const std::string& field) {
  if (field.empty()) return {};
  return csv::split_fields(field, '|');
}

std::string join_list(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += '|';
    out += names[i];
  }
  return out;
}

const std::vector<std::string> kCohortHeader = {"student_id", "cohort", "passed", "right_answers", "wrong_answers"};

}  // namespace

std::vector<StudentRecord> parse_cohort(const std::string& text, const TaskManifest& manifest) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  bool header_seen = false;
  std::vector<StudentRecord> records;
  std::vector<std::size_t> lines;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = csv::split_fields(line);
    if (!header_seen) {
      if (fields != kCohortHeader) {
        throw ParseError(
            fmt::format("line {}: expected header 'student_id,cohort,passed,right_answers,wrong_answers'", number));
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != kCohortHeader.size()) {
      throw ParseError(fmt::format("line {}: expected 5 fields, got {}", number, fields.size()));
    }
    StudentRecord r;
    r.student_id = fields[0];
    r.cohort = fields[1];
    if (r.student_id.empty()) throw ParseError(fmt::format("line {}: empty student_id", number));
    try {
      r.passed = csv::parse_bool(fields[2]);
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("line {}: passed: {}", number, e.what()));
    }
    r.right_answers = split_list(fields[3]);
    r.wrong_answers = split_list(fields[4]);
    records.push_back(std::move(r));
    lines.push_back(number);
  }
  if (!header_seen) throw ParseError("cohort file is empty (missing header)");

  // Same checks as validate_records, reported with file line numbers.
  std::unordered_set<std::string> known;
  for (const auto& t : manifest.tasks()) known.insert(t.name);
  std::set<std::pair<std::string, std::string>> ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!ids.insert({r.cohort, r.student_id}).second) {
      throw ParseError(fmt::format("line {}: duplicate student_id '{}' in cohort '{}'", lines[i], r.student_id, r.cohort));
    }
    std::unordered_set<std::string> right;
    for (const auto& name : r.right_answers) {
      if (!known.count(name)) throw ParseError(fmt::format("line {}: unknown task '{}'", lines[i], name));
      right.insert(name);
    }
    for (const auto& name : r.wrong_answers) {
      if (!known.count(name)) throw ParseError(fmt::format("line {}: unknown task '{}'", lines[i], name));
      if (right.count(name)) {
        throw ParseError(fmt::format("line {}: task '{}' listed in both right_answers and wrong_answers", lines[i], name));
      }
    }
  }
  return records;
}

std::vector<StudentRecord> load_cohort(const std::filesystem::path& path, const TaskManifest& manifest) {
  try {
    return parse_cohort(csv::read_text(path), manifest);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string cohort_to_csv(const std::vector<StudentRecord>& records) {
  std::string out = "student_id,cohort,passed,right_answers,wrong_answers\n";
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{}\n", r.student_id, r.cohort, r.passed ? "true" : "false",
                       join_list(r.right_answers), join_list(r.wrong_answers));
  }
  return out;
}

LabeledDataset::LabeledDataset(Matrix features, std::vector<bool> labels, std::vector<std::string> feature_names,
                               std::vector<bool> synthetic_flags)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      synthetic_(std::move(synthetic_flags)) {
  if (synthetic_.empty()) synthetic_.assign(labels_.size(), false);
  if (features_.rows() != labels_.size() || synthetic_.size() != labels_.size()) {
    throw InvalidArgument(fmt::format("dataset has {} feature rows, {} labels and {} synthetic flags",
                                      features_.rows(), labels_.size(), synthetic_.size()));
  }
  if (features_.cols() != feature_names_.size() && !(features_.rows() == 0 && features_.cols() == 0)) {
    throw InvalidArgument(
        fmt::format("dataset has {} columns but {} feature names", features_.cols(), feature_names_.size()));
  }
  if (features_.rows() == 0 && features_.cols() == 0 && !feature_names_.empty()) {
    features_ = Matrix(0, feature_names_.size());
  }
  for (std::size_t i = 0; i < features_.rows(); ++i) {
    for (double v : features_.row(i)) {
      if (synthetic_[i]) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(fmt::format("row {}: synthetic value {} outside [0,1]", i, v));
      } else if (v != 0.0 && v != 1.0) {
        throw InvalidArgument(fmt::format("row {}: real rows must be 0/1, found {}", i, v));
      }
    }
  }
}

std::size_t LabeledDataset::count(bool label) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), label));
}

std::size_t LabeledDataset::synthetic_count() const {
  return static_cast<std::size_t>(std::count(synthetic_.begin(), synthetic_.end(), true));
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  std::vector<bool> labels, flags;
  labels.reserve(indices.size());
  flags.reserve(indices.size());
  for (auto i : indices) {
    if (i >= n_rows()) throw InvalidArgument(fmt::format("row index {} out of range ({} rows)", i, n_rows()));
    labels.push_back(labels_[i]);
    flags.push_back(synthetic_[i]);
  }
  Matrix features = features_.select_rows(indices);
  if (indices.empty()) features = Matrix(0, n_features());
  return LabeledDataset(std::move(features), std::move(labels), feature_names_, std::move(flags));
}

LabeledDataset encode(const std::vector<StudentRecord>& records, const TaskManifest& manifest, int max_week) {
  std::vector<std::string> names;
  std::unordered_map<std::string, std::size_t> column;
  for (const auto& t : manifest.tasks()) {
    if (t.week <= max_week) {
      column.emplace(t.name, names.size());
      names.push_back(t.name);
    }
  }
  if (names.empty()) throw InvalidArgument(fmt::format("no tasks fall within weeks 1..{}", max_week));
  Matrix features(records.size(), names.size(), 0.0);
  std::vector<bool> labels;
  labels.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const auto& name : records[i].right_answers) {
      auto it = column.find(name);
      if (it != column.end()) features(i, it->second) = 1.0;
    }
    labels.push_back(records[i].passed);
  }
  return LabeledDataset(std::move(features), std::move(labels), std::move(names));
}

std::pair<std::size_t, std::size_t> stratified_train_counts(std::size_t n_false, std::size_t n_true,
                                                            double train_fraction) {
  const std::size_t n = n_false + n_true;
  const auto target = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
  std::array<std::size_t, 2> sizes{n_false, n_true};
  std::array<std::size_t, 2> counts{};
  std::array<double, 2> remainder{};
  for (int c = 0; c < 2; ++c) {
    double exact = train_fraction * static_cast<double>(sizes[c]);
    counts[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(counts[c]);
  }
  std::array<int, 2> order{0, 1};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(remainder[a] - remainder[b]) > 1e-9) return remainder[a] > remainder[b];
    if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
    return a > b;
  });
  std::size_t assigned = counts[0] + counts[1];
  for (int c : order) {
    if (assigned >= target) break;
    if (counts[c] + 1 < sizes[c]) {
      ++counts[c];
      ++assigned;
    }
  }
  return {counts[0], counts[1]};
}

TrainTestSplit split(const LabeledDataset& data, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw InvalidArgument(fmt::format("train_fraction must lie in (0,1), got {}", spec.train_fraction));
  }
  Rng rng(spec.seed);
  std::vector<std::size_t> train_rows, test_rows;
  if (spec.stratified) {
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < data.n_rows(); ++i) by_class[data.labels()[i] ? 1 : 0].push_back(i);
    for (int c = 0; c < 2; ++c) {
      if (by_class[c].size() < 2) {
        throw InvalidArgument(fmt::format("stratified split needs at least 2 rows of class '{}', found {}",
                                          c ? "true" : "false", by_class[c].size()));
      }
    }
    auto [n_false, n_true] = stratified_train_counts(by_class[0].size(), by_class[1].size(), spec.train_fraction);
    std::array<std::size_t, 2> take{n_false, n_true};
    for (int c = 0; c < 2; ++c) {
      rng.shuffle(std::span<std::size_t>(by_class[c]));
      train_rows.insert(train_rows.end(), by_class[c].begin(), by_class[c].begin() + static_cast<std::ptrdiff_t>(take[c]));
      test_rows.insert(test_rows.end(), by_class[c].begin() + static_cast<std::ptrdiff_t>(take[c]), by_class[c].end());
    }
  } else {
    std::vector<std::size_t> all(data.n_rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    rng.shuffle(std::span<std::size_t>(all));
    auto n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(all.size())));
    train_rows.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_train));
    test_rows.assign(all.begin() + static_cast<std::ptrdiff_t>(n_train), all.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  TrainTestSplit out{data.subset(train_rows), data.subset(test_rows), train_rows, test_rows};
  return out;
}

std::string dataset_to_csv(const LabeledDataset& data) {
  std::string out;
  for (const auto& name : data.feature_names()) {
    out += name;
    out += ',';
  }
  out += "label,synthetic\n";
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (double v : data.features().row(i)) {
      out += csv::format_double(v);
      out += ',';
    }
    out += data.labels()[i] ? "true" : "false";
    out += data.synthetic_flags()[i] ? ",1\n" : ",0\n";
  }
  return out;
}

LabeledDataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  std::vector<std::string> header;
  Matrix features;
  std::vector<bool> labels, flags;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = csv::split_fields(line);
    if (header.empty()) {
      if (fields.size() < 3 || fields[fields.size() - 2] != "label" || fields.back() != "synthetic") {
        throw ParseError(fmt::format("line {}: dataset header must end with 'label,synthetic'", number));
      }
      header = std::move(fields);
      features = Matrix(0, header.size() - 2);
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError(fmt::format("line {}: expected {} fields, got {}", number, header.size(), fields.size()));
    }
    std::vector<double> row(header.size() - 2);
    try {
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = csv::parse_double(fields[j]);
      labels.push_back(csv::parse_bool(fields[fields.size() - 2]));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("line {}: {}", number, e.what()));
    }
    const auto& flag = fields.back();
    if (flag != "0" && flag != "1") throw ParseError(fmt::format("line {}: synthetic must be 0 or 1", number));
    flags.push_back(flag == "1");
    features.append_row(row);
  }
  if (header.empty()) throw ParseError("dataset file is empty (missing header)");
  header.resize(header.size() - 2);
  try {
    return LabeledDataset(std::move(features), std::move(labels), std::move(header), std::move(flags));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  try {
    return parse_dataset(csv::read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

}  // namespace atrisk
