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

#include "atrisk/naive_bayes.hpp"

#include <cmath>

#include "atrisk/error.hpp"

namespace atrisk {

NaiveBayesState fit_naive_bayes(const Matrix& x, const std::vector<bool>& labels, double alpha, double binarize) {
  if (!(alpha > 0.0)) throw InvalidArgument("naive Bayes alpha must be > 0");
  const std::size_t d = x.cols();
  std::array<double, 2> n{};
  std::array<std::vector<double>, 2> ones{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    int c = labels[i] ? 1 : 0;
    n[c] += 1.0;
    auto row = x.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      if (row[j] >= binarize) ones[c][j] += 1.0;
    }
  }
  NaiveBayesState state;
  state.binarize = binarize;
  for (int c = 0; c < 2; ++c) {
    state.log_prior[c] = std::log(n[c] / (n[0] + n[1]));
    state.log_p[c].resize(d);
    state.log_not_p[c].resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      double p = (ones[c][j] + alpha) / (n[c] + 2.0 * alpha);
      state.log_p[c][j] = std::log(p);
      state.log_not_p[c][j] = std::log1p(-p);
    }
  }
  return state;
}

double naive_bayes_p_true(const NaiveBayesState& state, std::span<const double> row) {
  std::array<double, 2> joint = state.log_prior;
  for (int c = 0; c < 2; ++c) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      joint[c] += row[j] >= state.binarize ? state.log_p[c][j] : state.log_not_p[c][j];
    }
  }
  // P(true) = 1 / (1 + exp(joint_false - joint_true))
  double diff = joint[0] - joint[1];
  if (diff >= 0.0) {
    double e = std::exp(-diff);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(diff));
}

}  // namespace atrisk
