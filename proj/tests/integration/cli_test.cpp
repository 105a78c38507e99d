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

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "app/run_manifest.hpp"
#include "atrisk/csv.hpp"
#include "atrisk/data_model.hpp"
#include "test_util.hpp"

namespace atrisk {
namespace {

namespace fs = std::filesystem;

struct Result {
  int status = -1;
  std::string output;  // stdout and stderr
};

Result run(const std::string& args) {
  const std::string command = std::string(ATRISK_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return r;
  char buffer[4096];
  while (std::size_t n = fread(buffer, 1, sizeof buffer, pipe)) r.output.append(buffer, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

void write_text(const fs::path& path, const std::string& text) { csv::write_file(path, text); }

const char* kFastConfig =
    "[run]\n"
    "seed = 7\n"
    "[tune]\n"
    "enabled = false\n";

TEST(Cli, PipelineIsByteIdenticalAcrossReruns) {
  testing::TempDir dir("cli");
  write_text(dir.path() / "run.ini", kFastConfig);
  for (const char* name : {"a", "b"}) {
    auto r = run("pipeline --config " + quoted(dir.path() / "run.ini") + " --out " + quoted(dir.path() / name));
    ASSERT_EQ(r.status, 0) << r.output;
  }
  EXPECT_EQ(csv::read_text(dir.path() / "a" / "run_manifest.json"), csv::read_text(dir.path() / "b" / "run_manifest.json"));
  auto rows = csv::read_file(dir.path() / "a" / "summary.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].fields.front(), "weeks_1_3");
  EXPECT_EQ(rows[1].fields.back(), "43");
  EXPECT_EQ(rows[2].fields.back(), "106");
  EXPECT_EQ(rows[3].fields.back(), "150");
}

TEST(Cli, SeedFlagWinsOverConfigAndChangesArtifacts) {
  testing::TempDir dir("cli");
  write_text(dir.path() / "run.ini", kFastConfig);
  ASSERT_EQ(run("simulate --config " + quoted(dir.path() / "run.ini") + " --seed 8 --out " + quoted(dir.path() / "flag")).status, 0);
  ASSERT_EQ(run("simulate --set run.seed=8 --out " + quoted(dir.path() / "set")).status, 0);
  ASSERT_EQ(run("simulate --config " + quoted(dir.path() / "run.ini") + " --out " + quoted(dir.path() / "file")).status, 0);
  const auto flag = app::sha256_file(dir.path() / "flag" / "cohort.csv");
  EXPECT_EQ(flag, app::sha256_file(dir.path() / "set" / "cohort.csv"));
  EXPECT_NE(flag, app::sha256_file(dir.path() / "file" / "cohort.csv"));
}

TEST(Cli, StagesRerunFromDiskMatchThePipeline) {
  testing::TempDir dir("cli");
  write_text(dir.path() / "run.ini",
             "[run]\nseed = 11\nintervals = 3\n[tune]\nk_neighbors = 5\nthreshold_step = 10\n");
  const std::string common = "--config " + quoted(dir.path() / "run.ini") + " --interval 3 --out ";
  auto r = run("pipeline --config " + quoted(dir.path() / "run.ini") + " --out " + quoted(dir.path() / "full"));
  ASSERT_EQ(r.status, 0) << r.output;

  const std::string staged = common + quoted(dir.path() / "staged");
  for (const std::string& stage :
       {"simulate", "encode", "split", "tune", "resample --tuned", "train --tuned", "evaluate --tuned", "pca-export"}) {
    auto s = run(stage + " " + staged);
    ASSERT_EQ(s.status, 0) << stage << ": " << s.output;
  }
  for (const char* name : {"cohort.csv", "manifest.csv", "dataset_w3.csv", "train_w3.csv", "test_w3.csv", "grid_w3.csv",
                           "best_w3.json", "train_w3_resampled.csv", "provenance_w3.csv", "model_w3.json",
                           "report_w3.json", "scatter_w3_smote.csv", "scatter_w3_adasyn.csv"}) {
    EXPECT_EQ(app::sha256_file(dir.path() / "full" / name), app::sha256_file(dir.path() / "staged" / name)) << name;
  }
}

TEST(Cli, EvaluateRefusesResampledTestFile) {
  testing::TempDir dir("cli");
  const std::string out = " --out " + quoted(dir.path());
  for (const char* stage : {"simulate", "encode", "split", "resample", "train"}) {
    ASSERT_EQ(run(std::string(stage) + out).status, 0) << stage;
  }
  auto r = run("evaluate --test " + quoted(dir.path() / "train_w3_resampled.csv") + out);
  EXPECT_EQ(r.status, 4) << r.output;
  EXPECT_NE(r.output.find("test purity"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir.path() / "report_w3.json"));

  auto ok = run("evaluate" + out);
  EXPECT_EQ(ok.status, 0) << ok.output;
  EXPECT_TRUE(fs::exists(dir.path() / "report_w3.json"));
}

TEST(Cli, MissingUpstreamArtifactNamesTheStage) {
  testing::TempDir dir("cli");
  auto r = run("split --interval 6 --out " + quoted(dir.path()));
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.output.find("stage 'split'"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("dataset_w6.csv"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("'encode'"), std::string::npos) << r.output;

  auto t = run("train --tuned --out " + quoted(dir.path()));
  EXPECT_EQ(t.status, 3);
  EXPECT_NE(t.output.find("'tune'"), std::string::npos) << t.output;
}

TEST(Cli, InvalidConfigKeyReportsKeyPath) {
  testing::TempDir dir("cli");
  write_text(dir.path() / "bad_model.ini", "[model]\nkind = logreg\ngamma = 0.5\n");
  auto r = run("pipeline --config " + quoted(dir.path() / "bad_model.ini") + " --out " + quoted(dir.path() / "o"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("model.gamma"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir.path() / "o"));

  write_text(dir.path() / "bad_section.ini", "[split]\ntrain_fraction = 0.8\n[resample]\nratio = 1\n");
  r = run("pipeline --config " + quoted(dir.path() / "bad_section.ini"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("resample.ratio"), std::string::npos) << r.output;

  r = run("encode --set split.train_fraction=1.5 --out " + quoted(dir.path() / "o"));
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("split.train_fraction"), std::string::npos) << r.output;

  r = run("encode --config " + quoted(dir.path() / "nope.ini"));
  EXPECT_EQ(r.status, 2);
}

TEST(Cli, IngestsExternalCohort) {
  testing::TempDir dir("cli");
  ASSERT_EQ(run("simulate --seed 3 --set simulate.n_students=150 --out " + quoted(dir.path() / "src")).status, 0);
  write_text(dir.path() / "ingest.ini", "[input]\ncohort = " + (dir.path() / "src" / "cohort.csv").string() +
                                            "\nmanifest = " + (dir.path() / "src" / "manifest.csv").string() +
                                            "\n[run]\nintervals = 3,6\n[tune]\nenabled = false\n");
  auto r = run("pipeline --config " + quoted(dir.path() / "ingest.ini") + " --out " + quoted(dir.path() / "out"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_EQ(csv::read_text(dir.path() / "src" / "cohort.csv"), csv::read_text(dir.path() / "out" / "cohort.csv"));
  EXPECT_EQ(csv::read_file(dir.path() / "out" / "summary.csv").size(), 3u);

  write_text(dir.path() / "src" / "cohort.csv", "student_id,cohort,passed,right_answers,wrong_answers\ns0001,2021,maybe,,\n");
  r = run("pipeline --config " + quoted(dir.path() / "ingest.ini") + " --out " + quoted(dir.path() / "out2"));
  EXPECT_EQ(r.status, 1) << r.output;
}

TEST(Cli, UnknownSubcommandIsUsageError) {
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("").status, 2);
}

}  // namespace
}  // namespace atrisk
