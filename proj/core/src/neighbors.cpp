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

#include <fmt/format.h>

#include "atrisk/error.hpp"

namespace atrisk {

namespace {

struct Candidate {
  double distance;
  std::size_t index;

  bool operator<(const Candidate& other) const {
    return distance != other.distance ? distance < other.distance : index < other.index;
  }
};

std::vector<std::size_t> nearest(std::span<const double> query, const Matrix& points,
                                 std::span<const std::size_t> candidates, std::size_t exclude, std::size_t k,
                                 std::vector<Candidate>& scratch) {
  scratch.clear();
  for (std::size_t c : candidates) {
    if (c == exclude) continue;
    scratch.push_back({squared_distance(query, points.row(c)), c});
  }
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k), scratch.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = scratch[i].index;
  return out;
}

void check_k(std::size_t k, std::size_t pool) {
  if (k == 0) throw InvalidArgument("k must be >= 1");
  if (k > pool) {
    throw InvalidArgument(fmt::format("k = {} exceeds the candidate pool of {} rows", k, pool));
  }
}

}  // namespace

NeighborLists knn_indices(const NeighborQuery& query, std::optional<std::span<const std::size_t>> subset) {
  if (subset) return knn_indices(query, *subset, *subset);
  std::vector<std::size_t> all(query.points.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return knn_indices(query, all, all);
}

NeighborLists knn_indices(const NeighborQuery& query, std::span<const std::size_t> queries,
                          std::span<const std::size_t> candidates) {
  const auto n = query.points.rows();
  for (auto* set : {&queries, &candidates}) {
    for (auto i : *set) {
      if (i >= n) throw InvalidArgument(fmt::format("row index {} out of range ({} rows)", i, n));
    }
  }
  std::vector<bool> is_candidate(n, false);
  for (auto c : candidates) is_candidate[c] = true;
  NeighborLists out;
  out.reserve(queries.size());
  std::vector<Candidate> scratch;
  scratch.reserve(candidates.size());
  for (auto q : queries) {
    check_k(query.k, candidates.size() - (is_candidate[q] ? 1 : 0));
    out.push_back(nearest(query.points.row(q), query.points, candidates, q, query.k, scratch));
  }
  return out;
}

NeighborLists knn_external(const Matrix& reference, const Matrix& queries, std::size_t k) {
  if (queries.rows() > 0 && queries.cols() != reference.cols()) {
    throw InvalidArgument(
        fmt::format("query rows have {} columns, reference has {}", queries.cols(), reference.cols()));
  }
  check_k(k, reference.rows());
  std::vector<std::size_t> all(reference.rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  NeighborLists out;
  out.reserve(queries.rows());
  std::vector<Candidate> scratch;
  scratch.reserve(all.size());
  const std::size_t none = reference.rows();
  for (std::size_t q = 0; q < queries.rows(); ++q) {
    out.push_back(nearest(queries.row(q), reference, all, none, k, scratch));
  }
  return out;
}

}  // namespace atrisk
