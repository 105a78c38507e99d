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

#include <span>
#include <vector>

#include "atrisk/matrix.hpp"

namespace atrisk {

/// Penalized logistic regression objective over summed (not averaged) loss:
///
///   sum_i log(1 + exp(-y_i (w.x_i + b)))
///     + (1/C) * (l1_ratio * |w|_1 + (1 - l1_ratio)/2 * |w|_2^2)
///
/// with y_i in {-1, +1} (+1 = passed). The intercept is not penalized.
struct LogisticProblem {
  const Matrix& x;
  std::span<const double> y;
  double C = 1.0;
  double l1_ratio = 0.0;
};

double logistic_loss(const LogisticProblem& problem, std::span<const double> weights, double intercept);

/// Loss plus the squared-norm part of the penalty (the differentiable part).
double smooth_objective(const LogisticProblem& problem, std::span<const double> weights, double intercept);

/// Gradient of smooth_objective; `grad_weights` must have one entry per feature.
void smooth_gradient(const LogisticProblem& problem, std::span<const double> weights, double intercept,
                     std::span<double> grad_weights, double& grad_intercept);

double full_objective(const LogisticProblem& problem, std::span<const double> weights, double intercept);

struct LogisticState {
  std::vector<double> weights;
  double intercept = 0.0;
  int iterations = 0;
};

struct LogisticSolverOptions {
  double tolerance = 1e-8;
  int max_iterations = 10000;
  bool record_trace = false;
};

struct LogisticFit {
  LogisticState state;
  bool converged = false;
  /// Objective after each iteration, starting with the value at zero.
  std::vector<double> objective_trace;
};

/// Monotone accelerated proximal gradient (soft thresholding on the L1 part)
/// with backtracking on the smooth part's Lipschitz constant.
LogisticFit solve_logistic(const LogisticProblem& problem, const LogisticSolverOptions& options);

double sigmoid(double z);

}  // namespace atrisk
