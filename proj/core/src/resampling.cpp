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

#include <fmt/format.h>

#include "atrisk/csv.hpp"
#include "atrisk/error.hpp"
#include "atrisk/neighbors.hpp"
#include "atrisk/random.hpp"

namespace atrisk {

std::string to_string(ResampleMethod method) { return method == ResampleMethod::smote ? "smote" : "adasyn"; }

ResampleMethod parse_resample_method(const std::string& text) {
  if (text == "smote") return ResampleMethod::smote;
  if (text == "adasyn") return ResampleMethod::adasyn;
  throw InvalidArgument(fmt::format("unknown resampling method '{}' (expected smote or adasyn)", text));
}

void interpolate(std::span<const double> base, std::span<const double> neighbor, double lambda,
                 std::span<double> out) {
  for (std::size_t j = 0; j < base.size(); ++j) out[j] = base[j] + lambda * (neighbor[j] - base[j]);
}

namespace {

struct Classes {
  bool minority_label = false;
  std::vector<std::size_t> minority;
  std::size_t majority_count = 0;
};

Classes classes_of(const LabeledDataset& train, const ResampleConfig& config) {
  if (train.has_synthetic()) throw InvalidArgument("training set already contains synthetic rows");
  if (config.k_neighbors < 1) throw InvalidArgument("k_neighbors must be >= 1");
  Classes c;
  const std::size_t n_false = train.count(false), n_true = train.count(true);
  c.minority_label = n_true < n_false;
  c.majority_count = std::max(n_false, n_true);
  for (std::size_t i = 0; i < train.n_rows(); ++i) {
    if (train.labels()[i] == c.minority_label) c.minority.push_back(i);
  }
  if (c.minority.size() < config.k_neighbors + 1) {
    throw InvalidArgument(fmt::format(
        "minority class '{}' has {} rows; k_neighbors = {} needs at least {}. Use a smaller k_neighbors",
        c.minority_label ? "true" : "false", c.minority.size(), config.k_neighbors, config.k_neighbors + 1));
  }
  return c;
}

// Appends synthetic rows: per minority position m, allocation[m] rows
// interpolated toward random minority neighbors. `order` gives the sequence of
// minority positions to draw from.
ResampleResult generate(const LabeledDataset& train, const Classes& classes, const ResampleConfig& config,
                        const std::vector<std::size_t>& order, Rng& rng) {
  const auto& x = train.features();
  NeighborQuery query{x, config.k_neighbors};
  auto neighbors = knn_indices(query, std::span<const std::size_t>(classes.minority));

  ResampleResult result;
  result.minority_label = classes.minority_label;
  result.allocation.assign(classes.minority.size(), 0);

  Matrix features = x;
  std::vector<bool> labels = train.labels();
  std::vector<bool> flags = train.synthetic_flags();
  std::vector<double> row(x.cols());
  for (std::size_t m : order) {
    const std::size_t base = classes.minority[m];
    const std::size_t neighbor = neighbors[m][rng.index(config.k_neighbors)];
    const double lambda = rng.uniform();
    interpolate(x.row(base), x.row(neighbor), lambda, row);
    result.provenance.push_back({features.rows(), base, neighbor, lambda});
    features.append_row(row);
    labels.push_back(classes.minority_label);
    flags.push_back(true);
    ++result.allocation[m];
  }
  result.dataset = LabeledDataset(std::move(features), std::move(labels), train.feature_names(), std::move(flags));
  return result;
}

std::vector<std::size_t> round_robin(std::size_t minority, std::size_t total) {
  std::vector<std::size_t> order(total);
  for (std::size_t s = 0; s < total; ++s) order[s] = s % minority;
  return order;
}

}  // namespace

ResampleResult smote(const LabeledDataset& train, const ResampleConfig& config) {
  auto classes = classes_of(train, config);
  Rng rng(config.seed);
  const std::size_t total = classes.majority_count - classes.minority.size();
  return generate(train, classes, config, round_robin(classes.minority.size(), total), rng);
}

std::vector<std::size_t> allocate_by_weight(std::span<const double> weights, std::size_t total) {
  const std::size_t m = weights.size();
  std::vector<std::size_t> counts(m, 0);
  if (m == 0) return counts;
  std::vector<double> exact(m);
  long long assigned = 0;
  for (std::size_t i = 0; i < m; ++i) {
    exact[i] = weights[i] * static_cast<double>(total);
    counts[i] = static_cast<std::size_t>(std::llround(exact[i]));
    assigned += static_cast<long long>(counts[i]);
  }
  long long drift = static_cast<long long>(total) - assigned;
  if (drift == 0) return counts;

  // Rows most under-rounded receive the missing units; rows most over-rounded
  // give back the excess. Ties go to the larger weight, then the lower index.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto residual = [&](std::size_t i) { return exact[i] - static_cast<double>(counts[i]); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double ra = residual(a), rb = residual(b);
    if (ra != rb) return drift > 0 ? ra > rb : ra < rb;
    return weights[a] > weights[b];
  });
  std::size_t pos = 0;
  while (drift != 0) {
    std::size_t i = order[pos % m];
    if (drift > 0) {
      ++counts[i];
      --drift;
    } else if (counts[i] > 0) {
      --counts[i];
      ++drift;
    }
    ++pos;
  }
  return counts;
}

ResampleResult adasyn(const LabeledDataset& train, const ResampleConfig& config) {
  auto classes = classes_of(train, config);
  Rng rng(config.seed);
  const std::size_t m = classes.minority.size();
  const std::size_t total = classes.majority_count - m;

  // Density ratio over the whole training set.
  std::vector<std::size_t> all(train.n_rows());
  std::iota(all.begin(), all.end(), std::size_t{0});
  NeighborQuery query{train.features(), config.k_neighbors};
  auto mixed = knn_indices(query, classes.minority, all);
  std::vector<double> density(m);
  double density_sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t majority = 0;
    for (auto j : mixed[i]) majority += train.labels()[j] != classes.minority_label;
    density[i] = static_cast<double>(majority) / static_cast<double>(config.k_neighbors);
    density_sum += density[i];
  }

  std::vector<std::size_t> order;
  bool fallback = density_sum == 0.0;
  if (fallback) {
    order = round_robin(m, total);
  } else {
    std::vector<double> weights(m);
    for (std::size_t i = 0; i < m; ++i) weights[i] = density[i] / density_sum;
    auto counts = allocate_by_weight(weights, total);
    for (std::size_t i = 0; i < m; ++i) order.insert(order.end(), counts[i], i);
  }
  auto result = generate(train, classes, config, order, rng);
  result.density = std::move(density);
  result.uniform_fallback = fallback;
  return result;
}

ResampleResult resample(const LabeledDataset& train, const ResampleConfig& config) {
  return config.method == ResampleMethod::smote ? smote(train, config) : adasyn(train, config);
}

std::string provenance_to_csv(const std::vector<SyntheticProvenance>& provenance) {
  std::string out = "synthetic_row,base_row,neighbor_row,lambda\n";
  for (const auto& p : provenance) {
    out += fmt::format("{},{},{},{}\n", p.synthetic_row, p.base_row, p.neighbor_row, csv::format_double(p.lambda));
  }
  return out;
}

}  // namespace atrisk
