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

#include <map>

#include <benchmark/benchmark.h>

#include "atrisk/classifiers.hpp"
#include "atrisk/cohortsim.hpp"
#include "atrisk/data_model.hpp"
#include "atrisk/neighbors.hpp"
#include "atrisk/projection.hpp"
#include "atrisk/resampling.hpp"

namespace {

using namespace atrisk;

// Training split of the default simulated cohort for weeks 1..week.
const LabeledDataset& train_split(int week) {
  static std::map<int, LabeledDataset> cache;
  auto it = cache.find(week);
  if (it == cache.end()) {
    SimConfig config;
    config.seed = 1;
    auto cohort = simulate(config);
    it = cache.emplace(week, split(encode(cohort.records, cohort.manifest, week), SplitSpec{0.8, 1}).train).first;
  }
  return it->second;
}

void BM_KnnAllRows(benchmark::State& state) {
  const auto& data = train_split(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(knn_indices(NeighborQuery{data.features(), 5}));
}
BENCHMARK(BM_KnnAllRows)->Arg(3)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_Smote(benchmark::State& state) {
  const auto& data = train_split(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(smote(data, {ResampleMethod::smote, 5, 3}));
}
BENCHMARK(BM_Smote)->Arg(3)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_Adasyn(benchmark::State& state) {
  const auto& data = train_split(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(adasyn(data, {ResampleMethod::adasyn, 5, 3}));
}
BENCHMARK(BM_Adasyn)->Arg(3)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_LogisticFit(benchmark::State& state) {
  const auto& data = train_split(static_cast<int>(state.range(0)));
  auto augmented = smote(data, {ResampleMethod::smote, 5, 3}).dataset;
  auto spec = ModelSpec::from_parameters(ModelKind::logreg, {{"penalty", "elasticnet"}, {"l1_ratio", "0.5"},
                                                             {"C", state.range(1) == 0 ? "0.01" : "1"}});
  for (auto _ : state) benchmark::DoNotOptimize(fit(spec, augmented));
}
BENCHMARK(BM_LogisticFit)->Args({3, 0})->Args({3, 1})->Args({9, 0})->Args({9, 1})->Unit(benchmark::kMillisecond);

void BM_ForestFit(benchmark::State& state) {
  const auto& data = train_split(3);
  auto spec = ModelSpec::defaults(ModelKind::random_forest);
  for (auto _ : state) benchmark::DoNotOptimize(fit(spec, data));
}
BENCHMARK(BM_ForestFit)->Unit(benchmark::kMillisecond);

void BM_SvmRbfFit(benchmark::State& state) {
  const auto& data = train_split(3);
  auto spec = ModelSpec::defaults(ModelKind::svm_rbf);
  for (auto _ : state) benchmark::DoNotOptimize(fit(spec, data));
}
BENCHMARK(BM_SvmRbfFit)->Unit(benchmark::kMillisecond);

void BM_Pca(benchmark::State& state) {
  const auto& data = train_split(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_pca(data.features(), 2));
}
BENCHMARK(BM_Pca)->Arg(3)->Arg(6)->Arg(9)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
