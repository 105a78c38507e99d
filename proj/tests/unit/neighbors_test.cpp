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

#include "atrisk/neighbors.hpp"

#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "atrisk/error.hpp"
#include "test_util.hpp"

namespace atrisk {
namespace {

// All-pairs oracle: full distance table, then a stable sort of every row.
NeighborLists all_pairs_oracle(const Matrix& points, std::size_t k) {
  const std::size_t n = points.rows();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < points.cols(); ++c) s += (points(i, c) - points(j, c)) * (points(i, c) - points(j, c));
      dist[i][j] = s;
    }
  NeighborLists out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[i][a] < dist[i][b]; });
    out[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

TEST(Knn, LineExample) {
  Matrix points{{0, 0}, {1, 0}, {5, 0}};
  auto nn = knn_indices({points, 1});
  EXPECT_EQ(nn, (NeighborLists{{1}, {0}, {1}}));
}

TEST(Knn, TiesGoToLowerIndex) {
  Matrix points{{0, 0}, {1, 1}, {1, 1}, {-1, -1}};
  auto nn = knn_indices({points, 2});
  EXPECT_EQ(nn[0], (std::vector<std::size_t>{1, 2}));
  // Row 1's duplicate is at distance 0.
  EXPECT_EQ(nn[1], (std::vector<std::size_t>{2, 0}));
  EXPECT_EQ(nn[2], (std::vector<std::size_t>{1, 0}));
}

TEST(Knn, MatchesAllPairsOracleOnRandomSets) {
  Rng rng(5);
  Matrix points = testing::random_matrix(rng, 50, 10);
  EXPECT_EQ(knn_indices({points, 5}), all_pairs_oracle(points, 5));
  Matrix binary = testing::random_binary(rng, 60, 8);
  EXPECT_EQ(knn_indices({binary, 7}), all_pairs_oracle(binary, 7));
}

TEST(Knn, SubsetRestrictsCandidates) {
  Matrix points{{0}, {1}, {2}, {10}, {11}};
  std::vector<std::size_t> subset = {0, 3, 4};
  auto nn = knn_indices({points, 1}, std::span<const std::size_t>(subset));
  EXPECT_EQ(nn, (NeighborLists{{3}, {4}, {3}}));
}

TEST(Knn, SeparateQueriesAndCandidates) {
  Matrix points{{0}, {1}, {2}, {10}};
  std::vector<std::size_t> queries = {3};
  std::vector<std::size_t> candidates = {0, 1, 2, 3};
  auto nn = knn_indices({points, 2}, queries, candidates);
  EXPECT_EQ(nn, (NeighborLists{{2, 1}}));
}

TEST(Knn, ExternalQueriesDoNotExcludeAnything) {
  Matrix reference{{0}, {1}, {2}};
  Matrix queries{{1}, {1.6}};
  auto nn = knn_external(reference, queries, 2);
  EXPECT_EQ(nn, (NeighborLists{{1, 0}, {2, 1}}));
  EXPECT_THROW(knn_external(reference, Matrix{{1, 2}}, 1), InvalidArgument);
}

TEST(Knn, PoolTooSmallStatesSize) {
  Matrix points{{0}, {1}, {2}};
  try {
    knn_indices({points, 3});
    FAIL() << "expected rejection";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("pool of 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(knn_indices({points, 0}), InvalidArgument);
}

TEST(Knn, ClosestPairAreMutualNearest) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix points = testing::random_matrix(rng, 30, 4);
    double best = 1e300;
    std::size_t a = 0, b = 0;
    for (std::size_t i = 0; i < points.rows(); ++i)
      for (std::size_t j = i + 1; j < points.rows(); ++j) {
        double d = squared_distance(points.row(i), points.row(j));
        if (d < best) best = d, a = i, b = j;
      }
    auto nn = knn_indices({points, 1});
    EXPECT_EQ(squared_distance(points.row(a), points.row(nn[a][0])), best);
    EXPECT_EQ(squared_distance(points.row(b), points.row(nn[b][0])), best);
  }
}

TEST(Knn, PermutationEquivariantWithDistinctDistances) {
  Rng rng(13);
  Matrix points = testing::random_matrix(rng, 25, 3);
  std::vector<std::size_t> perm(points.rows());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(perm));
  Matrix permuted = points.select_rows(perm);  // permuted row i = original row perm[i]
  auto original = knn_indices({points, 4});
  auto shuffled = knn_indices({permuted, 4});
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(perm[shuffled[i][k]], original[perm[i]][k]);
  }
}

}  // namespace
}  // namespace atrisk
