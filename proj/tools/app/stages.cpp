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

#include "app/stages.hpp"

#include <fmt/format.h>

#include "app/run_manifest.hpp"
#include "atrisk/csv.hpp"
#include "atrisk/evaluation.hpp"
#include "atrisk/grid_search.hpp"
#include "atrisk/projection.hpp"
#include "json.hpp"

namespace atrisk::app {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

MissingArtifact::MissingArtifact(const std::string& stage, const fs::path& path, const std::string& producer)
    : Error(fmt::format("stage '{}': missing upstream artifact '{}' (run '{}' first)", stage, path.string(), producer)),
      stage_(stage) {}

fs::path Layout::dataset(int week) const { return out / fmt::format("dataset_w{}.csv", week); }
fs::path Layout::train(int week) const { return out / fmt::format("train_w{}.csv", week); }
fs::path Layout::test(int week) const { return out / fmt::format("test_w{}.csv", week); }
fs::path Layout::resampled(int week) const { return out / fmt::format("train_w{}_resampled.csv", week); }
fs::path Layout::provenance(int week) const { return out / fmt::format("provenance_w{}.csv", week); }
fs::path Layout::model(int week) const { return out / fmt::format("model_w{}.json", week); }
fs::path Layout::report(int week) const { return out / fmt::format("report_w{}.json", week); }
fs::path Layout::grid(int week) const { return out / fmt::format("grid_w{}.csv", week); }
fs::path Layout::best(int week) const { return out / fmt::format("best_w{}.json", week); }
fs::path Layout::scatter(int week, ResampleMethod method) const {
  return out / fmt::format("scatter_w{}_{}.csv", week, to_string(method));
}

namespace {

void require(const std::string& stage, const fs::path& path, const std::string& producer) {
  if (!fs::exists(path)) throw MissingArtifact(stage, path, producer);
}

fs::path write(const fs::path& path, const std::string& contents) {
  fs::create_directories(path.parent_path());
  csv::write_file(path, contents);
  return path;
}

std::string model_parameters(const ModelSpec& spec) {
  std::string out;
  for (const auto& [k, v] : spec.parameters()) {
    if (k == "tolerance" || k == "max_iterations" || k == "seed") continue;
    if (!out.empty()) out += ';';
    out += k + "=" + v;
  }
  return out;
}

json model_to_cell_json(const ModelSpec& spec) {
  json params = json::object();
  for (const auto& [k, v] : spec.parameters()) {
    if (k != "seed") params[k] = v;
  }
  return {{"kind", to_string(spec.kind)}, {"parameters", params}};
}

EvalReport report_from_json(const json& doc) {
  ConfusionMatrix c;
  const auto& m = doc.at("confusion");
  c.counts[0][0] = m.at("actual_false").at("predicted_false").get<std::size_t>();
  c.counts[0][1] = m.at("actual_false").at("predicted_true").get<std::size_t>();
  c.counts[1][0] = m.at("actual_true").at("predicted_false").get<std::size_t>();
  c.counts[1][1] = m.at("actual_true").at("predicted_true").get<std::size_t>();
  EvalReport r = metrics_from_confusion(c);
  r.threshold = doc.at("threshold").get<double>();
  r.auc = doc.at("auc").get<double>();
  r.auc_undefined = doc.at("auc_undefined").get<bool>();
  return r;
}

}  // namespace

std::string describe_cell(const StageSettings& s) {
  return fmt::format("{}(k={})+{}({})", to_string(s.method), s.k_neighbors, to_string(s.model.kind),
                     model_parameters(s.model));
}

StageSettings settings_from_config(const RunConfig& config) {
  return {config.method, config.k_neighbors, config.model, config.threshold};
}

StageSettings settings_from_tuning(const RunConfig& config, int week) {
  const Layout layout{config.out};
  require("train", layout.best(week), "tune");
  try {
    auto doc = json::parse(csv::read_text(layout.best(week)));
    StageSettings s;
    s.method = parse_resample_method(doc.at("method").get<std::string>());
    s.k_neighbors = doc.at("k_neighbors").get<std::size_t>();
    const auto& model = doc.at("model");
    s.model = ModelSpec::from_parameters(parse_model_kind(model.at("kind").get<std::string>()),
                                         model.at("parameters").get<std::map<std::string, std::string>>());
    s.threshold = doc.at("threshold").get<double>();
    return s;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("{}: {}", layout.best(week).string(), e.what()));
  }
}

Written run_simulate(const RunConfig& config) {
  SimConfig sim = config.sim;
  sim.seed = config.stage_seed(seed_offset::simulate);
  auto cohort = simulate(sim);
  const Layout layout{config.out};
  return {write(layout.manifest(), manifest_to_csv(cohort.manifest)), write(layout.cohort(), cohort_to_csv(cohort.records))};
}

Written run_ingest(const RunConfig& config) {
  if (!config.cohort || !config.manifest) throw ConfigError("ingest needs input.cohort and input.manifest");
  require("ingest", *config.manifest, "an external export");
  require("ingest", *config.cohort, "an external export");
  auto manifest = load_manifest(*config.manifest);
  auto records = load_cohort(*config.cohort, manifest);
  const Layout layout{config.out};
  // Re-serialized so downstream stages always see the canonical form.
  return {write(layout.manifest(), manifest_to_csv(manifest)), write(layout.cohort(), cohort_to_csv(records))};
}

Written run_encode(const RunConfig& config, int week) {
  const Layout layout{config.out};
  require("encode", layout.manifest(), "simulate");
  require("encode", layout.cohort(), "simulate");
  auto manifest = load_manifest(layout.manifest());
  auto records = load_cohort(layout.cohort(), manifest);
  return {write(layout.dataset(week), dataset_to_csv(encode(records, manifest, week)))};
}

Written run_split(const RunConfig& config, int week) {
  const Layout layout{config.out};
  require("split", layout.dataset(week), "encode");
  SplitSpec spec = config.split;
  spec.seed = config.stage_seed(seed_offset::split);
  auto parts = split(load_dataset(layout.dataset(week)), spec);
  return {write(layout.train(week), dataset_to_csv(parts.train)), write(layout.test(week), dataset_to_csv(parts.test))};
}

Written run_resample(const RunConfig& config, int week, const StageSettings& settings) {
  const Layout layout{config.out};
  require("resample", layout.train(week), "split");
  ResampleConfig rc{settings.method, settings.k_neighbors, config.stage_seed(seed_offset::resample)};
  auto result = resample(load_dataset(layout.train(week)), rc);
  return {write(layout.resampled(week), dataset_to_csv(result.dataset)),
          write(layout.provenance(week), provenance_to_csv(result.provenance))};
}

Written run_train(const RunConfig& config, int week, const StageSettings& settings,
                  const std::optional<fs::path>& train_path) {
  const Layout layout{config.out};
  const fs::path input = train_path.value_or(layout.resampled(week));
  require("train", input, train_path ? "an earlier stage" : "resample");
  ModelSpec spec = settings.model;
  spec.seed = config.stage_seed(seed_offset::train);
  return {write(layout.model(week), model_to_json(fit(spec, load_dataset(input))))};
}

Written run_evaluate(const RunConfig& config, int week, const StageSettings& settings,
                     const std::optional<fs::path>& model_path, const std::optional<fs::path>& test_path) {
  const Layout layout{config.out};
  const fs::path model_file = model_path.value_or(layout.model(week));
  const fs::path test_file = test_path.value_or(layout.test(week));
  require("evaluate", model_file, "train");
  require("evaluate", test_file, "split");
  auto model = model_from_json(csv::read_text(model_file));
  auto test = load_dataset(test_file);
  auto report = evaluate(model, test, settings.threshold);
  StageSettings described = settings;
  described.model = model.spec;
  json doc;
  doc["interval"] = week;
  doc["n_features"] = test.n_features();
  doc["cell"] = describe_cell(described);
  doc["report"] = json::parse(report_to_json(report));
  return {write(layout.report(week), doc.dump(2) + "\n")};
}

Written run_tune(const RunConfig& config, int week) {
  const Layout layout{config.out};
  require("tune", layout.train(week), "split");
  GridSpec grid;
  for (std::size_t k : config.tune.k_neighbors) grid.resamplers.push_back({config.method, k});
  if (config.model.kind == ModelKind::logreg) {
    grid.models = GridSpec::standard().models;
  } else {
    grid.models = {config.model};
  }
  grid.thresholds =
      GridSpec::threshold_range(config.tune.threshold_from, config.tune.threshold_to, config.tune.threshold_step);
  grid.metric = config.tune.metric;
  grid.folds = config.tune.folds;
  grid.seed = config.stage_seed(seed_offset::tune);
  auto result = grid_search(grid, load_dataset(layout.train(week)));
  if (result.ranked.empty() || !result.ranked.front().feasible) {
    throw InvalidArgument(fmt::format("stage 'tune': no feasible grid cell for weeks 1-{}", week));
  }
  const auto& best = result.ranked.front();
  json doc;
  doc["method"] = to_string(best.resampler.method);
  doc["k_neighbors"] = best.resampler.k_neighbors;
  doc["model"] = model_to_cell_json(best.model);
  doc["threshold"] = best.threshold;
  doc["cv"] = {{"precision_false", best.mean.precision_false}, {"recall_false", best.mean.recall_false},
               {"f1_false", best.mean.f1_false},               {"accuracy", best.mean.accuracy},
               {"auc", best.mean.auc}};
  doc["audit"] = {{"folds", result.audit.folds},
                  {"validation_rows_checked", result.audit.validation_rows_checked},
                  {"synthetic_rows_in_validation", result.audit.synthetic_rows_in_validation},
                  {"synthetic_rows_generated", result.audit.synthetic_rows_generated},
                  {"passed", result.audit.passed}};
  return {write(layout.grid(week), grid_result_to_csv(result)), write(layout.best(week), doc.dump(2) + "\n")};
}

Written run_pca_export(const RunConfig& config, int week) {
  const Layout layout{config.out};
  require("pca-export", layout.train(week), "split");
  auto train = load_dataset(layout.train(week));
  Written written;
  for (auto method : {ResampleMethod::smote, ResampleMethod::adasyn}) {
    ResampleConfig rc{method, config.k_neighbors, config.stage_seed(seed_offset::resample)};
    auto augmented = resample(train, rc).dataset;
    auto model = fit_pca(config.pca_union ? augmented.features() : train.features(), 2);
    written.push_back(write(layout.scatter(week, method), scatter_to_csv(model, augmented, to_string(method))));
  }
  return written;
}

Written run_summary(const RunConfig& config) {
  const Layout layout{config.out};
  std::vector<SummaryRow> rows;
  for (int week : config.intervals) {
    require("summary", layout.report(week), "evaluate");
    try {
      auto doc = json::parse(csv::read_text(layout.report(week)));
      rows.push_back({fmt::format("weeks_1_{}", week), doc.at("cell").get<std::string>(),
                      report_from_json(doc.at("report")), doc.at("n_features").get<std::size_t>()});
    } catch (const json::exception& e) {
      throw ParseError(fmt::format("{}: {}", layout.report(week).string(), e.what()));
    }
  }
  return {write(layout.summary(), summary_to_csv(rows))};
}

Written run_pipeline(const RunConfig& config) {
  validate(config);
  Written written;
  auto append = [&](Written w) { written.insert(written.end(), w.begin(), w.end()); };
  append(config.cohort ? run_ingest(config) : run_simulate(config));
  for (int week : config.intervals) {
    append(run_encode(config, week));
    append(run_split(config, week));
    StageSettings settings = settings_from_config(config);
    if (config.tune.enabled) {
      append(run_tune(config, week));
      settings = settings_from_tuning(config, week);
    }
    append(run_resample(config, week, settings));
    append(run_train(config, week, settings));
    append(run_evaluate(config, week, settings));
    append(run_pca_export(config, week));
  }
  append(run_summary(config));
  const Layout layout{config.out};
  written.push_back(write(layout.run_manifest(), build_run_manifest(config.out, written, describe(config))));
  return written;
}

}  // namespace atrisk::app
