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

#include "app/config.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include <fmt/format.h>

#include "atrisk/csv.hpp"

namespace atrisk::app {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

template <typename T>
std::vector<T> parse_list(const std::string& value, T (*parse_one)(std::string_view)) {
  std::vector<T> out;
  for (const auto& field : csv::split_fields(value)) out.push_back(parse_one(trim(field)));
  return out;
}

int as_int(std::string_view s) { return static_cast<int>(csv::parse_int(s)); }
std::size_t as_size(std::string_view s) {
  const long long v = csv::parse_int(s);
  if (v < 0) throw InvalidArgument(fmt::format("expected a non-negative integer, got '{}'", s));
  return static_cast<std::size_t>(v);
}
std::string as_string(std::string_view s) { return std::string(s); }

std::string join(const auto& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::string>) out += v;
    else out += fmt::format("{}", v);
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run.seed", [](RunConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(csv::parse_int(v)); }},
      {"run.out", [](RunConfig& c, const std::string& v) { c.out = v; }},
      {"run.intervals", [](RunConfig& c, const std::string& v) { c.intervals = parse_list<int>(v, as_int); }},
      {"run.interval", [](RunConfig& c, const std::string& v) { c.interval = as_int(v); }},
      {"input.cohort", [](RunConfig& c, const std::string& v) { c.cohort = v; }},
      {"input.manifest", [](RunConfig& c, const std::string& v) { c.manifest = v; }},
      {"simulate.n_students", [](RunConfig& c, const std::string& v) { c.sim.n_students = as_int(v); }},
      {"simulate.fail_rate", [](RunConfig& c, const std::string& v) { c.sim.fail_rate = csv::parse_double(v); }},
      {"simulate.tasks_per_week",
       [](RunConfig& c, const std::string& v) {
         c.sim.tasks_per_week = parse_list<int>(v, as_int);
         c.sim.n_weeks = static_cast<int>(c.sim.tasks_per_week.size());
       }},
      {"simulate.ability_spread", [](RunConfig& c, const std::string& v) { c.sim.ability_spread = csv::parse_double(v); }},
      {"simulate.difficulty_spread",
       [](RunConfig& c, const std::string& v) { c.sim.difficulty_spread = csv::parse_double(v); }},
      {"simulate.noise", [](RunConfig& c, const std::string& v) { c.sim.noise = csv::parse_double(v); }},
      {"simulate.attempt_rate", [](RunConfig& c, const std::string& v) { c.sim.attempt_rate = csv::parse_double(v); }},
      {"simulate.week_drift", [](RunConfig& c, const std::string& v) { c.sim.week_drift = csv::parse_double(v); }},
      {"simulate.label_mode",
       [](RunConfig& c, const std::string& v) {
         if (v == "quantile") c.sim.label_mode = LabelMode::quantile;
         else if (v == "stochastic") c.sim.label_mode = LabelMode::stochastic;
         else throw InvalidArgument(fmt::format("expected quantile or stochastic, got '{}'", v));
       }},
      {"simulate.cohorts", [](RunConfig& c, const std::string& v) { c.sim.cohorts = parse_list<std::string>(v, as_string); }},
      {"split.train_fraction", [](RunConfig& c, const std::string& v) { c.split.train_fraction = csv::parse_double(v); }},
      {"split.stratified", [](RunConfig& c, const std::string& v) { c.split.stratified = csv::parse_bool(v); }},
      {"resample.method", [](RunConfig& c, const std::string& v) { c.method = parse_resample_method(v); }},
      {"resample.k_neighbors", [](RunConfig& c, const std::string& v) { c.k_neighbors = as_size(v); }},
      // Resets every other model parameter to the defaults of the new kind.
      {"model.kind",
       [](RunConfig& c, const std::string& v) { c.model = ModelSpec::defaults(parse_model_kind(v)); }},
      {"evaluate.threshold", [](RunConfig& c, const std::string& v) { c.threshold = csv::parse_double(v); }},
      {"tune.enabled", [](RunConfig& c, const std::string& v) { c.tune.enabled = csv::parse_bool(v); }},
      {"tune.folds", [](RunConfig& c, const std::string& v) { c.tune.folds = as_size(v); }},
      {"tune.metric",
       [](RunConfig& c, const std::string& v) {
         if (v == "f1_false") c.tune.metric = SelectionMetric::f1_false;
         else if (v == "recall_false") c.tune.metric = SelectionMetric::recall_false;
         else throw InvalidArgument(fmt::format("expected f1_false or recall_false, got '{}'", v));
       }},
      {"tune.k_neighbors", [](RunConfig& c, const std::string& v) { c.tune.k_neighbors = parse_list<std::size_t>(v, as_size); }},
      {"tune.threshold_from", [](RunConfig& c, const std::string& v) { c.tune.threshold_from = as_int(v); }},
      {"tune.threshold_to", [](RunConfig& c, const std::string& v) { c.tune.threshold_to = as_int(v); }},
      {"tune.threshold_step", [](RunConfig& c, const std::string& v) { c.tune.threshold_step = as_int(v); }},
      {"pca.fit",
       [](RunConfig& c, const std::string& v) {
         if (v == "union") c.pca_union = true;
         else if (v == "real") c.pca_union = false;
         else throw InvalidArgument(fmt::format("expected union or real, got '{}'", v));
       }},
  };
  return table;
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& path, const std::string& value) {
  const auto& table = setters();
  auto it = table.find(path);
  try {
    if (it != table.end()) {
      it->second(config, value);
      return;
    }
    if (path.rfind("model.", 0) == 0) {
      const std::string key = path.substr(6);
      auto params = config.model.parameters();
      // Seeds derive from run.seed.
      if (key == "seed" || !params.count(key)) {
        throw ConfigError(fmt::format("invalid config key '{}' (not a parameter of model kind '{}')", path,
                                      to_string(config.model.kind)));
      }
      params[key] = value;
      config.model = ModelSpec::from_parameters(config.model.kind, params);
      return;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(fmt::format("invalid value for config key '{}': {}", path, e.what()));
  }
  throw ConfigError(fmt::format("invalid config key '{}'", path));
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto comment = line.find_first_of("#;");
    std::string content = trim(comment == std::string::npos ? line : line.substr(0, comment));
    if (content.empty()) continue;
    if (content.front() == '[') {
      if (content.back() != ']') throw ConfigError(fmt::format("line {}: malformed section header", number));
      section = trim(std::string_view(content).substr(1, content.size() - 2));
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", number));
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (section.empty()) throw ConfigError(fmt::format("line {}: key '{}' outside any section", number, key));
    apply_setting(base, section + "." + key, value);
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  if (!std::filesystem::exists(path)) throw ConfigError(fmt::format("config file '{}' not found", path.string()));
  return parse_config(csv::read_text(path), std::move(base));
}

void validate(const RunConfig& config) {
  try {
    validate(config.sim);
  } catch (const Error& e) {
    throw ConfigError(fmt::format("simulate: {}", e.what()));
  }
  if (config.intervals.empty()) throw ConfigError("run.intervals must list at least one week");
  for (int w : config.intervals) {
    if (w < 1) throw ConfigError(fmt::format("run.intervals: week {} must be >= 1", w));
  }
  if (config.interval < 1) throw ConfigError("run.interval must be >= 1");
  if (!(config.split.train_fraction > 0.0 && config.split.train_fraction < 1.0)) {
    throw ConfigError("split.train_fraction must lie strictly inside (0,1)");
  }
  if (config.k_neighbors < 1) throw ConfigError("resample.k_neighbors must be >= 1");
  if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
    throw ConfigError("evaluate.threshold must lie strictly inside (0,1)");
  }
  if (config.tune.folds < 2) throw ConfigError("tune.folds must be >= 2");
  if (config.tune.k_neighbors.empty()) throw ConfigError("tune.k_neighbors must not be empty");
  if (config.tune.threshold_step <= 0 || config.tune.threshold_from <= 0 || config.tune.threshold_to >= 100 ||
      config.tune.threshold_from > config.tune.threshold_to) {
    throw ConfigError("tune thresholds must satisfy 0 < from <= to < 100 with a positive step");
  }
  if (config.cohort.has_value() != config.manifest.has_value()) {
    throw ConfigError("input.cohort and input.manifest must be given together");
  }
  for (const auto& [key, path] : {std::pair{"input.cohort", config.cohort}, std::pair{"input.manifest", config.manifest}}) {
    if (path && !std::filesystem::exists(*path)) {
      throw ConfigError(fmt::format("{}: file '{}' not found", key, path->string()));
    }
  }
}

std::map<std::string, std::string> describe(const RunConfig& c) {
  std::map<std::string, std::string> out;
  out["run.seed"] = std::to_string(c.seed);
  out["run.intervals"] = join(c.intervals);
  out["input.cohort"] = c.cohort ? c.cohort->string() : "";
  out["input.manifest"] = c.manifest ? c.manifest->string() : "";
  out["simulate.n_students"] = std::to_string(c.sim.n_students);
  out["simulate.fail_rate"] = csv::format_double(c.sim.fail_rate);
  out["simulate.tasks_per_week"] = join(c.sim.tasks_per_week);
  out["simulate.ability_spread"] = csv::format_double(c.sim.ability_spread);
  out["simulate.difficulty_spread"] = csv::format_double(c.sim.difficulty_spread);
  out["simulate.noise"] = csv::format_double(c.sim.noise);
  out["simulate.attempt_rate"] = csv::format_double(c.sim.attempt_rate);
  out["simulate.week_drift"] = csv::format_double(c.sim.week_drift);
  out["simulate.label_mode"] = c.sim.label_mode == LabelMode::quantile ? "quantile" : "stochastic";
  out["simulate.cohorts"] = join(c.sim.cohorts);
  out["split.train_fraction"] = csv::format_double(c.split.train_fraction);
  out["split.stratified"] = c.split.stratified ? "true" : "false";
  out["resample.method"] = to_string(c.method);
  out["resample.k_neighbors"] = std::to_string(c.k_neighbors);
  out["model.kind"] = to_string(c.model.kind);
  for (const auto& [k, v] : c.model.parameters()) {
    if (k != "seed") out["model." + k] = v;
  }
  out["evaluate.threshold"] = csv::format_double(c.threshold);
  out["tune.enabled"] = c.tune.enabled ? "true" : "false";
  out["tune.folds"] = std::to_string(c.tune.folds);
  out["tune.metric"] = c.tune.metric == SelectionMetric::f1_false ? "f1_false" : "recall_false";
  out["tune.k_neighbors"] = join(c.tune.k_neighbors);
  out["tune.threshold_from"] = std::to_string(c.tune.threshold_from);
  out["tune.threshold_to"] = std::to_string(c.tune.threshold_to);
  out["tune.threshold_step"] = std::to_string(c.tune.threshold_step);
  out["pca.fit"] = c.pca_union ? "union" : "real";
  return out;
}

}  // namespace atrisk::app
