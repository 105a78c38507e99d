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

#include "atrisk/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "atrisk/cohortsim.hpp"
#include "atrisk/error.hpp"
#include "test_util.hpp"

namespace atrisk {
namespace {

LabeledDataset simulated_train(std::uint64_t seed, int week = 6) {
  SimConfig config;
  config.seed = seed;
  auto cohort = simulate(config);
  return split(encode(cohort.records, cohort.manifest, week), {0.8, seed, true}).train;
}

void expect_structure(const LabeledDataset& train, const ResampleResult& r) {
  const auto& out = r.dataset;
  EXPECT_EQ(out.count(false), out.count(true));
  EXPECT_EQ(out.n_features(), train.n_features());
  ASSERT_EQ(out.n_rows(), train.n_rows() + r.provenance.size());
  for (std::size_t i = 0; i < train.n_rows(); ++i) {
    auto a = train.features().row(i), b = out.features().row(i);
    ASSERT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
    ASSERT_EQ(out.labels()[i], train.labels()[i]);
    ASSERT_FALSE(out.synthetic_flags()[i]);
  }
  for (const auto& p : r.provenance) {
    ASSERT_TRUE(out.synthetic_flags()[p.synthetic_row]);
    ASSERT_EQ(out.labels()[p.synthetic_row], r.minority_label);
    ASSERT_EQ(train.labels()[p.base_row], r.minority_label);
    ASSERT_EQ(train.labels()[p.neighbor_row], r.minority_label);
    ASSERT_NE(p.base_row, p.neighbor_row);
    ASSERT_GE(p.lambda, 0.0);
    ASSERT_LE(p.lambda, 1.0);
    auto s = out.features().row(p.synthetic_row);
    auto base = train.features().row(p.base_row), nb = train.features().row(p.neighbor_row);
    for (std::size_t j = 0; j < s.size(); ++j) {
      ASSERT_GE(s[j], std::min(base[j], nb[j]));
      ASSERT_LE(s[j], std::max(base[j], nb[j]));
    }
  }
}

TEST(Smote, BalancesReferenceSplit) {
  auto train = simulated_train(42);
  ASSERT_EQ(train.count(true), 258u);
  ASSERT_EQ(train.count(false), 45u);
  auto r = smote(train, {ResampleMethod::smote, 5, 1});
  EXPECT_EQ(r.provenance.size(), 213u);
  EXPECT_EQ(r.dataset.count(false), 258u);
  EXPECT_EQ(r.dataset.count(true), 258u);
  EXPECT_FALSE(r.minority_label);
  expect_structure(train, r);
}

TEST(Smote, LambdaZeroReproducesBase) {
  std::vector<double> base = {0, 1, 1, 0}, nb = {1, 1, 0, 0}, out(4);
  interpolate(base, nb, 0.0, out);
  EXPECT_EQ(out, base);
  interpolate(base, nb, 1.0, out);
  EXPECT_EQ(out, nb);
}

TEST(Smote, TwoPointMinorityStaysOnSegment) {
  Matrix x{{0.0, 1.0, 0.0}, {1.0, 1.0, 1.0}, {0, 0, 0}, {1, 0, 0}, {0, 0, 1}, {1, 1, 0}};
  LabeledDataset train(x, {false, false, true, true, true, true}, testing::column_names(3));
  auto r = smote(train, {ResampleMethod::smote, 1, 9});
  ASSERT_EQ(r.provenance.size(), 2u);
  auto p = x.row(0), q = x.row(1);
  for (const auto& prov : r.provenance) {
    auto s = r.dataset.features().row(prov.synthetic_row);
    // s - p must be parallel to q - p.
    std::vector<double> u(3), v(3);
    for (int j = 0; j < 3; ++j) {
      u[j] = s[j] - p[j];
      v[j] = q[j] - p[j];
      EXPECT_GE(s[j], std::min(p[j], q[j]));
      EXPECT_LE(s[j], std::max(p[j], q[j]));
    }
    double cx = u[1] * v[2] - u[2] * v[1], cy = u[2] * v[0] - u[0] * v[2], cz = u[0] * v[1] - u[1] * v[0];
    EXPECT_LT(std::sqrt(cx * cx + cy * cy + cz * cz), 1e-9);
  }
}

TEST(Smote, RoundRobinBaseCounts) {
  auto train = simulated_train(7);
  auto r = smote(train, {ResampleMethod::smote, 5, 3});
  auto [lo, hi] = std::minmax_element(r.allocation.begin(), r.allocation.end());
  EXPECT_LE(*hi - *lo, 1u);
  EXPECT_EQ(std::accumulate(r.allocation.begin(), r.allocation.end(), std::size_t{0}), r.provenance.size());
}

TEST(Smote, Deterministic) {
  auto train = simulated_train(3);
  auto a = smote(train, {ResampleMethod::smote, 5, 17});
  auto b = smote(train, {ResampleMethod::smote, 5, 17});
  EXPECT_EQ(a.dataset, b.dataset);
  EXPECT_EQ(provenance_to_csv(a.provenance), provenance_to_csv(b.provenance));
  auto c = smote(train, {ResampleMethod::smote, 5, 18});
  EXPECT_NE(a.dataset, c.dataset);
}

TEST(Smote, MinorityTooSmallForK) {
  Matrix x{{0}, {1}, {0}, {1}, {1}};
  LabeledDataset train(x, {false, false, true, true, true}, {"a"});
  try {
    smote(train, {ResampleMethod::smote, 2, 0});
    FAIL() << "expected rejection";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("smaller k_neighbors"), std::string::npos) << e.what();
  }
  EXPECT_NO_THROW(smote(train, {ResampleMethod::smote, 1, 0}));
}

TEST(Smote, RefusesAlreadyResampledInput) {
  auto train = simulated_train(1);
  auto r = smote(train, {ResampleMethod::smote, 5, 0});
  EXPECT_THROW(smote(r.dataset, {ResampleMethod::smote, 5, 0}), InvalidArgument);
}

TEST(Adasyn, AllocationExample) {
  std::vector<double> w = {0.5, 0.3, 0.2};
  EXPECT_EQ(allocate_by_weight(w, 10), (std::vector<std::size_t>{5, 3, 2}));
}

TEST(Adasyn, AllocationAlwaysSumsToTotal) {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t m = 1 + rng.index(40);
    std::vector<double> w(m);
    double sum = 0;
    for (auto& v : w) sum += (v = rng.uniform() < 0.3 ? 0.0 : rng.uniform());
    if (sum == 0) continue;
    for (auto& v : w) v /= sum;
    std::size_t total = rng.index(300);
    auto counts = allocate_by_weight(w, total);
    ASSERT_EQ(std::accumulate(counts.begin(), counts.end(), std::size_t{0}), total);
    for (std::size_t i = 0; i < m; ++i) ASSERT_LE(std::abs(static_cast<double>(counts[i]) - w[i] * total), 1.0 + 1e-9);
  }
}

TEST(Adasyn, HardMinorityRowGetsLargestShare) {
  // Minority rows 0..4 are unit vectors e_0..e_4 (pairwise squared distance 2).
  // Minority row 5 is all ones, inside the majority cluster of rows with one
  // zero (distance 1 from row 5, distance >= 4 from the unit vectors).
  Matrix x(0, 6);
  std::vector<bool> labels;
  for (std::size_t i = 0; i < 5; ++i) {
    std::vector<double> row(6, 0.0);
    row[i] = 1.0;
    x.append_row(row);
    labels.push_back(false);
  }
  x.append_row(std::vector<double>(6, 1.0));
  labels.push_back(false);
  for (std::size_t i = 0; i < 20; ++i) {
    std::vector<double> row(6, 1.0);
    row[i % 6] = 0.0;
    x.append_row(row);
    labels.push_back(true);
  }
  LabeledDataset train(x, labels, testing::column_names(6));
  auto r = adasyn(train, {ResampleMethod::adasyn, 5, 2});
  ASSERT_EQ(r.density.size(), 6u);
  EXPECT_EQ(r.density[5], 1.0);
  EXPECT_FALSE(r.uniform_fallback);
  EXPECT_EQ(*std::max_element(r.allocation.begin(), r.allocation.end()), r.allocation[5]);
  // Rows 0..4 see four minority rows and one majority row: r = 0.2 each.
  // r_hat = (0.1 x5, 0.5), G = 14: raw (1.4 x5, 7) rounds to (1 x5, 7), and
  // the two missing rows go to the lowest-index rows with remainder 0.4.
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(r.density[i], 0.2);
  EXPECT_EQ(r.allocation, (std::vector<std::size_t>{2, 2, 1, 1, 1, 7}));
  expect_structure(train, r);
}

TEST(Adasyn, SeparatedClassesFallBackToUniform) {
  Matrix x(0, 1);
  std::vector<bool> labels;
  for (int i = 0; i < 6; ++i) {
    x.append_row(std::vector<double>{0.0});
    labels.push_back(false);
  }
  for (int i = 0; i < 30; ++i) {
    x.append_row(std::vector<double>{1.0});
    labels.push_back(true);
  }
  LabeledDataset train(x, labels, {"a"});
  auto a = adasyn(train, {ResampleMethod::adasyn, 5, 0});
  auto s = smote(train, {ResampleMethod::smote, 5, 0});
  EXPECT_TRUE(a.uniform_fallback);
  EXPECT_EQ(a.dataset.count(false), s.dataset.count(false));
  EXPECT_EQ(a.dataset.count(true), s.dataset.count(true));
  EXPECT_EQ(a.allocation, s.allocation);
}

TEST(Adasyn, StructureOnSimulatedSplits) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto train = simulated_train(seed, 3);
    auto r = adasyn(train, {ResampleMethod::adasyn, 5, seed});
    expect_structure(train, r);
    EXPECT_EQ(std::accumulate(r.allocation.begin(), r.allocation.end(), std::size_t{0}),
              train.count(true) - train.count(false));
  }
}

TEST(ProvenanceCsv, Header) {
  auto text = provenance_to_csv({{5, 1, 2, 0.25}});
  EXPECT_EQ(text, "synthetic_row,base_row,neighbor_row,lambda\n5,1,2,0.25\n");
}

}  // namespace
}  // namespace atrisk
