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

#include "atrisk/cohortsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "atrisk/error.hpp"
#include "atrisk/logistic.hpp"
#include "atrisk/random.hpp"

namespace atrisk {

std::string task_name(int week, int index) { return fmt::format("w{}_t{:02}", week, index); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument(fmt::format("quantile probability must lie in (0,1), got {}", p));
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    double mid = 0.5 * (lo + hi);
    double cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
    (cdf < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void validate(const SimConfig& c) {
  if (c.n_students < 10) throw InvalidArgument(fmt::format("n_students must be >= 10, got {}", c.n_students));
  if (!(c.fail_rate > 0.0 && c.fail_rate < 1.0)) throw InvalidArgument("fail_rate must lie in (0,1)");
  if (c.n_weeks < 1) throw InvalidArgument("n_weeks must be >= 1");
  if (static_cast<int>(c.tasks_per_week.size()) != c.n_weeks) {
    throw InvalidArgument(fmt::format("tasks_per_week has {} entries for {} weeks", c.tasks_per_week.size(), c.n_weeks));
  }
  if (std::any_of(c.tasks_per_week.begin(), c.tasks_per_week.end(), [](int n) { return n < 0; })) {
    throw InvalidArgument("tasks_per_week entries must be non-negative");
  }
  if (std::accumulate(c.tasks_per_week.begin(), c.tasks_per_week.end(), 0) == 0) {
    throw InvalidArgument("configuration has zero tasks");
  }
  if (!(c.ability_spread > 0.0)) throw InvalidArgument("ability_spread must be > 0");
  if (!(c.difficulty_spread > 0.0)) throw InvalidArgument("difficulty_spread must be > 0");
  if (!(c.noise >= 0.0 && c.noise <= 0.5)) throw InvalidArgument("noise must lie in [0, 0.5]");
  if (!(c.attempt_rate >= 0.0 && c.attempt_rate <= 1.0)) throw InvalidArgument("attempt_rate must lie in [0, 1]");
  if (c.cohorts.empty()) throw InvalidArgument("at least one cohort label is required");
}

SimulatedCohort simulate(const SimConfig& config) {
  validate(config);
  Rng rng(config.seed);
  const auto n = static_cast<std::size_t>(config.n_students);

  SimulatedCohort out;
  out.abilities.resize(n);
  for (auto& a : out.abilities) a = config.ability_spread * rng.normal();

  std::vector<TaskId> tasks;
  std::vector<double> difficulty;
  for (int w = 1; w <= config.n_weeks; ++w) {
    for (int t = 1; t <= config.tasks_per_week[static_cast<std::size_t>(w - 1)]; ++t) {
      tasks.push_back({task_name(w, t), w});
      difficulty.push_back(config.difficulty_spread * rng.normal() + config.week_drift * (w - 1));
    }
  }

  std::vector<bool> failing(n, false);
  if (config.label_mode == LabelMode::quantile) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return out.abilities[a] < out.abilities[b]; });
    auto n_fail = static_cast<std::size_t>(std::llround(config.fail_rate * static_cast<double>(n)));
    for (std::size_t i = 0; i < n_fail; ++i) failing[order[i]] = true;
  } else {
    const double cut = config.ability_spread * normal_quantile(config.fail_rate);
    for (std::size_t i = 0; i < n; ++i) failing[i] = out.abilities[i] < cut;
  }

  out.records.reserve(n);
  const std::size_t n_cohorts = config.cohorts.size();
  for (std::size_t i = 0; i < n; ++i) {
    StudentRecord r;
    r.student_id = fmt::format("s{:04}", i + 1);
    r.cohort = config.cohorts[i * n_cohorts / n];
    r.passed = !failing[i];
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      double p = sigmoid(out.abilities[i] - difficulty[t]);
      bool correct = rng.uniform() < p;
      if (rng.uniform() < config.noise) correct = !correct;
      bool attempted = rng.uniform() < config.attempt_rate;
      if (correct) {
        r.right_answers.push_back(tasks[t].name);
      } else if (attempted) {
        r.wrong_answers.push_back(tasks[t].name);
      }
    }
    out.records.push_back(std::move(r));
  }
  out.manifest = TaskManifest(std::move(tasks));
  return out;
}

}  // namespace atrisk
