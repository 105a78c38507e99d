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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "app/config.hpp"
#include "app/stages.hpp"

namespace {

using namespace atrisk;
using namespace atrisk::app;

enum ExitCode : int { ok = 0, failure = 1, usage = 2, missing_artifact = 3, test_purity = 4 };

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> settings;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> interval;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "Config file ([section] key = value)");
  cmd->add_option("--set", opts.settings, "Override one setting, e.g. --set model.C=0.1")->type_name("KEY=VALUE");
  cmd->add_option("--seed", opts.seed, "Root seed");
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_option("--interval", opts.interval, "Last week of the interval (e.g. 3, 6, 9)");
}

// Defaults, then the config file, then --set, then dedicated flags.
RunConfig resolve(const CommonOptions& opts) {
  RunConfig config;
  if (!opts.config_path.empty()) config = load_config(opts.config_path);
  for (const auto& kv : opts.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
    apply_setting(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.seed) config.seed = *opts.seed;
  if (opts.out) config.out = *opts.out;
  if (opts.interval) config.interval = *opts.interval;
  validate(config);
  return config;
}

void report(const Written& written) {
  for (const auto& path : written) std::cout << "wrote " << path.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"atrisk: imbalanced at-risk student classification pipeline"};
  cli.require_subcommand(1);

  CommonOptions opts;
  std::string method_text;
  std::optional<std::size_t> k_neighbors;
  std::optional<double> threshold;
  std::optional<std::string> train_path, model_path, test_path;
  bool tuned = false;

  auto* simulate_cmd = cli.add_subcommand("simulate", "Generate a synthetic cohort and task manifest");
  add_common(simulate_cmd, opts);
  auto* ingest_cmd = cli.add_subcommand("ingest", "Validate input.cohort/input.manifest and copy them to --out");
  add_common(ingest_cmd, opts);
  auto* encode_cmd = cli.add_subcommand("encode", "One-hot encode the cohort for one interval");
  add_common(encode_cmd, opts);
  auto* split_cmd = cli.add_subcommand("split", "Stratified train/test split of an encoded interval");
  add_common(split_cmd, opts);
  auto* resample_cmd = cli.add_subcommand("resample", "Oversample the training split (SMOTE or ADASYN)");
  add_common(resample_cmd, opts);
  resample_cmd->add_option("--method", method_text, "smote or adasyn");
  resample_cmd->add_option("--k", k_neighbors, "Neighbors for interpolation");
  resample_cmd->add_flag("--tuned", tuned, "Use the cell chosen by 'tune'");
  auto* train_cmd = cli.add_subcommand("train", "Fit the configured model");
  add_common(train_cmd, opts);
  train_cmd->add_option("--train", train_path, "Training CSV (default: the resampled split)");
  train_cmd->add_flag("--tuned", tuned, "Use the cell chosen by 'tune'");
  auto* evaluate_cmd = cli.add_subcommand("evaluate", "Score a model on the real test split");
  add_common(evaluate_cmd, opts);
  evaluate_cmd->add_option("--model", model_path, "Model JSON (default: model_w<interval>.json)");
  evaluate_cmd->add_option("--test", test_path, "Test CSV (default: test_w<interval>.csv)");
  evaluate_cmd->add_option("--threshold", threshold, "Decision threshold on P(false)");
  evaluate_cmd->add_flag("--tuned", tuned, "Use the cell chosen by 'tune'");
  auto* tune_cmd = cli.add_subcommand("tune", "Cross-validated grid search on the training split");
  add_common(tune_cmd, opts);
  auto* pca_cmd = cli.add_subcommand("pca-export", "Write 2-D PCA scatter CSVs for SMOTE and ADASYN");
  add_common(pca_cmd, opts);
  auto* summary_cmd = cli.add_subcommand("summary", "Collect per-interval reports into summary.csv");
  add_common(summary_cmd, opts);
  auto* pipeline_cmd = cli.add_subcommand("pipeline", "Run every stage for every interval");
  add_common(pipeline_cmd, opts);

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return cli.exit(e) == 0 ? ok : usage;
  }

  try {
    RunConfig config = resolve(opts);
    if (!method_text.empty()) config.method = parse_resample_method(method_text);
    if (k_neighbors) config.k_neighbors = *k_neighbors;
    if (threshold) config.threshold = *threshold;
    validate(config);
    const int week = config.interval;
    auto settings = [&] { return tuned ? settings_from_tuning(config, week) : settings_from_config(config); };

    if (simulate_cmd->parsed()) report(run_simulate(config));
    else if (ingest_cmd->parsed()) report(run_ingest(config));
    else if (encode_cmd->parsed()) report(run_encode(config, week));
    else if (split_cmd->parsed()) report(run_split(config, week));
    else if (resample_cmd->parsed()) report(run_resample(config, week, settings()));
    else if (train_cmd->parsed()) report(run_train(config, week, settings(), train_path));
    else if (evaluate_cmd->parsed()) {
      auto s = settings();
      if (threshold) s.threshold = *threshold;
      report(run_evaluate(config, week, s, model_path, test_path));
    } else if (tune_cmd->parsed()) report(run_tune(config, week));
    else if (pca_cmd->parsed()) report(run_pca_export(config, week));
    else if (summary_cmd->parsed()) report(run_summary(config));
    else if (pipeline_cmd->parsed()) report(run_pipeline(config));
    return ok;
  } catch (const ConfigError& e) {
    std::cerr << "atrisk: config error: " << e.what() << '\n';
    return usage;
  } catch (const MissingArtifact& e) {
    std::cerr << "atrisk: " << e.what() << '\n';
    return missing_artifact;
  } catch (const TestPurityError& e) {
    std::cerr << "atrisk: refused: " << e.what() << '\n';
    return test_purity;
  } catch (const std::exception& e) {
    std::cerr << "atrisk: error: " << e.what() << '\n';
    return failure;
  }
}
