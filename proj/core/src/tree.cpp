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

#include "atrisk/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "atrisk/error.hpp"
#include "atrisk/random.hpp"

namespace atrisk {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;  // sum over children of n_child * gini_child
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const std::vector<bool>& labels, const TreeOptions& options)
      : x_(x), labels_(labels), options_(options), rng_(options.seed), features_(x.cols()) {
    std::iota(features_.begin(), features_.end(), 0);
  }

  TreeState build(std::vector<std::size_t> rows) {
    TreeState tree;
    grow(tree, std::move(rows), 0);
    return tree;
  }

 private:
  int grow(TreeState& tree, std::vector<std::size_t> rows, int depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    std::size_t positives = 0;
    for (auto r : rows) positives += labels_[r];
    const std::size_t n = rows.size();
    tree.nodes[id].samples = n;
    tree.nodes[id].p_true = n ? static_cast<double>(positives) / static_cast<double>(n) : 0.5;

    const bool pure = positives == 0 || positives == n;
    const bool depth_reached = options_.max_depth > 0 && depth >= options_.max_depth;
    if (pure || depth_reached || n < static_cast<std::size_t>(std::max(2, options_.min_samples_split))) return id;

    Split best = find_split(rows, positives);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (x_(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[id].feature = best.feature;
    tree.nodes[id].threshold = best.threshold;
    int l = grow(tree, std::move(left), depth + 1);
    int r = grow(tree, std::move(right), depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }

  Split find_split(const std::vector<std::size_t>& rows, std::size_t positives) {
    const int d = static_cast<int>(x_.cols());
    const bool subsample = options_.max_features > 0 && options_.max_features < d;
    if (subsample) rng_.shuffle(std::span<int>(features_));

    Split best;
    int examined = 0;
    std::vector<std::pair<double, bool>> values(rows.size());
    for (int k = 0; k < d; ++k) {
      const int f = subsample ? features_[static_cast<std::size_t>(k)] : k;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        values[i] = {x_(rows[i], static_cast<std::size_t>(f)), labels_[rows[i]]};
      }
      std::sort(values.begin(), values.end());
      if (values.front().first == values.back().first) continue;
      ++examined;
      scan_feature(f, values, positives, best);
      if (subsample && examined >= options_.max_features) break;
    }
    return best;
  }

  static void scan_feature(int f, const std::vector<std::pair<double, bool>>& values, std::size_t positives,
                           Split& best) {
    const double n = static_cast<double>(values.size());
    const double total_pos = static_cast<double>(positives);
    double left_pos = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      left_pos += values[i].second;
      if (values[i].first == values[i + 1].first) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = n - nl;
      const double right_pos = total_pos - left_pos;
      const double score = (nl - (left_pos * left_pos + (nl - left_pos) * (nl - left_pos)) / nl) +
                           (nr - (right_pos * right_pos + (nr - right_pos) * (nr - right_pos)) / nr);
      double threshold = 0.5 * (values[i].first + values[i + 1].first);
      if (!(threshold < values[i + 1].first)) threshold = values[i].first;
      if (better(score, f, threshold, best)) best = {f, threshold, score};
    }
  }

  // Lower impurity wins; within 1e-12, lower feature index then lower threshold.
  static bool better(double score, int f, double threshold, const Split& best) {
    if (best.feature < 0) return true;
    if (score < best.score - 1e-12) return true;
    if (score > best.score + 1e-12) return false;
    if (f != best.feature) return f < best.feature;
    return threshold < best.threshold;
  }

  const Matrix& x_;
  const std::vector<bool>& labels_;
  TreeOptions options_;
  Rng rng_;
  std::vector<int> features_;
};

}  // namespace

TreeState fit_tree(const Matrix& x, const std::vector<bool>& labels, std::span<const std::size_t> rows,
                   const TreeOptions& options) {
  if (labels.size() != x.rows()) throw InvalidArgument("label count does not match row count");
  if (rows.empty()) throw InvalidArgument("cannot fit a tree on zero rows");
  TreeBuilder builder(x, labels, options);
  return builder.build(std::vector<std::size_t>(rows.begin(), rows.end()));
}

double tree_p_true(const TreeState& tree, std::span<const double> row) {
  std::size_t node = 0;
  while (!tree.nodes[node].is_leaf()) {
    const auto& n = tree.nodes[node];
    node = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return tree.nodes[node].p_true;
}

ForestState fit_forest(const Matrix& x, const std::vector<bool>& labels, const ForestOptions& options) {
  if (options.n_trees < 1) throw InvalidArgument("n_trees must be >= 1");
  const std::size_t n = x.rows();
  if (n == 0) throw InvalidArgument("cannot fit a forest on zero rows");
  TreeOptions tree_options = options.tree;
  if (tree_options.max_features <= 0) {
    tree_options.max_features = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(x.cols())))));
  }
  const std::uint64_t root = options.tree.seed;
  ForestState forest;
  forest.trees.reserve(static_cast<std::size_t>(options.n_trees));
  std::vector<std::size_t> rows(n);
  for (int t = 0; t < options.n_trees; ++t) {
    const auto stream = static_cast<std::uint64_t>(t);
    if (options.bootstrap) {
      Rng sampler(derive_seed(root, 2 * stream));
      for (auto& r : rows) r = sampler.index(n);
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    tree_options.seed = derive_seed(root, 2 * stream + 1);
    forest.trees.push_back(fit_tree(x, labels, rows, tree_options));
  }
  return forest;
}

double forest_p_true(const ForestState& forest, std::span<const double> row) {
  double sum = 0.0;
  for (const auto& tree : forest.trees) sum += tree_p_true(tree, row);
  return sum / static_cast<double>(forest.trees.size());
}

}  // namespace atrisk
