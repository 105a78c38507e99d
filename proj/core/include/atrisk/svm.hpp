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

enum class KernelKind { linear, rbf };

struct Kernel {
  KernelKind kind = KernelKind::linear;
  double gamma = 1.0;

  double operator()(std::span<const double> a, std::span<const double> b) const;
};

/// Default RBF width: 1 / (d * mean of the per-feature variances).
double default_gamma(const Matrix& x);

struct SmoOptions {
  double C = 1.0;
  double tolerance = 1e-3;
  int max_iterations = 100000;
};

struct SmoSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Soft-margin dual
///   min 1/2 a'Qa - e'a,  0 <= a_i <= C,  y'a = 0,  Q_ij = y_i y_j K(x_i, x_j)
/// by sequential minimal optimization with second-order working set selection.
SmoSolution solve_smo(const Matrix& x, std::span<const double> y, const Kernel& kernel, const SmoOptions& options);

/// Sigmoid link P(+1 | f) = 1 / (1 + exp(a f + b)) fitted by Newton's method on
/// smoothed targets.
struct PlattLink {
  double a = 0.0;
  double b = 0.0;
};

PlattLink fit_platt(std::span<const double> decision_values, std::span<const double> y);

double platt_probability(const PlattLink& link, double decision_value);

struct SvmState {
  Kernel kernel;
  Matrix support;
  std::vector<double> coefficients;  // alpha_i * y_i
  double bias = 0.0;
  PlattLink link;
};

double svm_decision(const SvmState& state, std::span<const double> row);

}  // namespace atrisk
