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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "atrisk/matrix.hpp"

namespace atrisk {

enum class Metric { euclidean };

struct NeighborQuery {
  const Matrix& points;
  std::size_t k = 1;
  Metric metric = Metric::euclidean;
};

using NeighborLists = std::vector<std::vector<std::size_t>>;

/// k nearest neighbors of every row in `subset` (all rows when absent) among
/// the rows of `subset`, excluding the row itself. Returned indices are row
/// indices of `query.points`, nearest first, ties broken by lower index.
NeighborLists knn_indices(const NeighborQuery& query,
                          std::optional<std::span<const std::size_t>> subset = std::nullopt);

/// Same as above with separate query and candidate row sets. A query row that
/// is also a candidate never appears in its own list.
NeighborLists knn_indices(const NeighborQuery& query, std::span<const std::size_t> queries,
                          std::span<const std::size_t> candidates);

/// Neighbors of external rows among all rows of `reference`; no self exclusion.
NeighborLists knn_external(const Matrix& reference, const Matrix& queries, std::size_t k);

}  // namespace atrisk
