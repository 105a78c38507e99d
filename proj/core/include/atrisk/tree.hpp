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
#include <span>
#include <vector>

#include "atrisk/matrix.hpp"

namespace atrisk {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;     // rows with x[feature] <= threshold
  int right = -1;
  double p_true = 0.0;
  std::size_t samples = 0;

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeState {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  friend bool operator==(const TreeState&, const TreeState&) = default;
};

struct TreeOptions {
  int max_depth = 0;          // 0 = unlimited
  int min_samples_split = 2;
  /// Features examined per split; 0 examines every feature in index order.
  /// When positive, features are visited in a seeded random order until this
  /// many non-constant ones have been evaluated.
  int max_features = 0;
  std::uint64_t seed = 0;
};

/// CART with Gini impurity. `rows` selects (with repetition, for bootstraps)
/// the training rows of `x`.
TreeState fit_tree(const Matrix& x, const std::vector<bool>& labels, std::span<const std::size_t> rows,
                   const TreeOptions& options);

double tree_p_true(const TreeState& tree, std::span<const double> row);

struct ForestState {
  std::vector<TreeState> trees;
};

struct ForestOptions {
  int n_trees = 100;
  TreeOptions tree;  // max_features 0 here means floor(sqrt(d))
  bool bootstrap = true;
};

ForestState fit_forest(const Matrix& x, const std::vector<bool>& labels, const ForestOptions& options);

double forest_p_true(const ForestState& forest, std::span<const double> row);

}  // namespace atrisk
