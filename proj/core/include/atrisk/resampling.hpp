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
#include <string>
#include <vector>

#include "atrisk/data_model.hpp"

namespace atrisk {

enum class ResampleMethod { smote, adasyn };

std::string to_string(ResampleMethod method);
ResampleMethod parse_resample_method(const std::string& text);

struct ResampleConfig {
  ResampleMethod method = ResampleMethod::smote;
  std::size_t k_neighbors = 5;
  // Only strategy "auto" exists: the minority class grows to the majority count.
  std::uint64_t seed = 0;
};

struct SyntheticProvenance {
  std::size_t synthetic_row = 0;  // row index in the resampled dataset
  std::size_t base_row = 0;       // row index in the input training set
  std::size_t neighbor_row = 0;
  double lambda = 0.0;
};

struct ResampleResult {
  LabeledDataset dataset;
  std::vector<SyntheticProvenance> provenance;
  /// Per minority row (in minority order) the number of synthetic rows it seeded.
  std::vector<std::size_t> allocation;
  /// ADASYN only: density ratios r_i of the minority rows.
  std::vector<double> density;
  /// ADASYN found no minority row with a majority neighbor and used uniform allocation.
  bool uniform_fallback = false;
  bool minority_label = false;
};

/// x_base + lambda * (x_neighbor - x_base), written into `out`.
void interpolate(std::span<const double> base, std::span<const double> neighbor, double lambda,
                 std::span<double> out);

ResampleResult smote(const LabeledDataset& train, const ResampleConfig& config);
ResampleResult adasyn(const LabeledDataset& train, const ResampleConfig& config);
ResampleResult resample(const LabeledDataset& train, const ResampleConfig& config);

/// Largest-remainder repair of round(weights_i * total) so that the counts sum to
/// `total`. `weights` must be non-negative and sum to 1.
std::vector<std::size_t> allocate_by_weight(std::span<const double> weights, std::size_t total);

/// Provenance CSV: `synthetic_row,base_row,neighbor_row,lambda`.
std::string provenance_to_csv(const std::vector<SyntheticProvenance>& provenance);

}  // namespace atrisk
