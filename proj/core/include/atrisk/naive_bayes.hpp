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

#include <array>
#include <vector>

#include "atrisk/matrix.hpp"

namespace atrisk {

/// Bernoulli naive Bayes with additive smoothing. Index 0 is the failing class.
struct NaiveBayesState {
  std::array<double, 2> log_prior{};
  std::array<std::vector<double>, 2> log_p{};      // log P(x_j = 1 | c)
  std::array<std::vector<double>, 2> log_not_p{};  // log P(x_j = 0 | c)
  double binarize = 0.5;
};

NaiveBayesState fit_naive_bayes(const Matrix& x, const std::vector<bool>& labels, double alpha, double binarize);

/// P(passed) for one row.
double naive_bayes_p_true(const NaiveBayesState& state, std::span<const double> row);

}  // namespace atrisk
