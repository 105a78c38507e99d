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
#include <string>
#include <vector>

#include "atrisk/data_model.hpp"

namespace atrisk {

enum class LabelMode {
  /// Failing count is exactly round(fail_rate * n_students): the lowest-ability
  /// students fail.
  quantile,
  /// Fail iff ability is below the fail_rate quantile of the ability
  /// distribution itself, so the failing count is binomial.
  stochastic,
};

/// Latent-ability cohort generator. Defaults give 379 students, 15% failing
/// and 43/106/150 tasks through weeks 3/6/9.
struct SimConfig {
  int n_students = 379;
  double fail_rate = 0.15;
  int n_weeks = 9;
  std::vector<int> tasks_per_week = {15, 14, 14, 21, 21, 21, 15, 15, 14};
  double ability_spread = 1.0;
  double difficulty_spread = 1.0;
  /// Probability that an outcome bit is flipped after the logistic draw.
  double noise = 0.05;
  /// Probability that an incorrect task was attempted (listed in wrong_answers)
  /// rather than skipped. Does not affect the encoding.
  double attempt_rate = 0.6;
  /// Mean difficulty increase per week, in standardized units.
  double week_drift = 0.15;
  LabelMode label_mode = LabelMode::quantile;
  std::vector<std::string> cohorts = {"2021", "2022", "2023"};
  std::uint64_t seed = 0;
};

void validate(const SimConfig& config);

struct SimulatedCohort {
  std::vector<StudentRecord> records;
  TaskManifest manifest;
  std::vector<double> abilities;
};

SimulatedCohort simulate(const SimConfig& config);

/// Task name used by the simulator, e.g. "w1_t01".
std::string task_name(int week, int index);

/// Inverse of the standard normal CDF.
double normal_quantile(double p);

}  // namespace atrisk
