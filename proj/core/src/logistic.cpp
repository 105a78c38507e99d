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

#include "atrisk/logistic.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "atrisk/error.hpp"

namespace atrisk {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + exp(-m)) without overflow.
double log1p_exp_neg(double m) { return m >= 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m)); }

double squared_norm(std::span<const double> w) { return dot(w, w); }

double l1_norm(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += std::abs(v);
  return s;
}

void check(const LogisticProblem& p, std::span<const double> weights) {
  if (p.y.size() != p.x.rows()) throw InvalidArgument("label count does not match row count");
  if (weights.size() != p.x.cols()) {
    throw InvalidArgument(fmt::format("expected {} weights, got {}", p.x.cols(), weights.size()));
  }
}

}  // namespace

double logistic_loss(const LogisticProblem& p, std::span<const double> weights, double intercept) {
  check(p, weights);
  double loss = 0.0;
  for (std::size_t i = 0; i < p.x.rows(); ++i) {
    loss += log1p_exp_neg(p.y[i] * (dot(p.x.row(i), weights) + intercept));
  }
  return loss;
}

double smooth_objective(const LogisticProblem& p, std::span<const double> weights, double intercept) {
  return logistic_loss(p, weights, intercept) + (1.0 - p.l1_ratio) / (2.0 * p.C) * squared_norm(weights);
}

double full_objective(const LogisticProblem& p, std::span<const double> weights, double intercept) {
  return smooth_objective(p, weights, intercept) + p.l1_ratio / p.C * l1_norm(weights);
}

void smooth_gradient(const LogisticProblem& p, std::span<const double> weights, double intercept,
                     std::span<double> grad_weights, double& grad_intercept) {
  check(p, weights);
  const double ridge = (1.0 - p.l1_ratio) / p.C;
  for (std::size_t j = 0; j < weights.size(); ++j) grad_weights[j] = ridge * weights[j];
  grad_intercept = 0.0;
  for (std::size_t i = 0; i < p.x.rows(); ++i) {
    auto row = p.x.row(i);
    double margin = p.y[i] * (dot(row, weights) + intercept);
    double coef = -p.y[i] * sigmoid(-margin);
    for (std::size_t j = 0; j < row.size(); ++j) grad_weights[j] += coef * row[j];
    grad_intercept += coef;
  }
}

LogisticFit solve_logistic(const LogisticProblem& p, const LogisticSolverOptions& options) {
  if (!(p.C > 0.0)) throw InvalidArgument(fmt::format("C must be > 0, got {}", p.C));
  if (!(p.l1_ratio >= 0.0 && p.l1_ratio <= 1.0)) throw InvalidArgument("l1_ratio must lie in [0,1]");
  const std::size_t d = p.x.cols();
  const double l1 = p.l1_ratio / p.C;

  // Parameter vectors carry the intercept in the last slot.
  std::vector<double> x(d + 1, 0.0), x_prev(d + 1, 0.0), y(d + 1, 0.0), z(d + 1, 0.0), grad(d + 1, 0.0);
  auto weights = [d](std::vector<double>& v) { return std::span<double>(v.data(), d); };
  auto smooth = [&](std::vector<double>& v) { return smooth_objective(p, weights(v), v[d]); };
  auto total = [&](std::vector<double>& v) { return full_objective(p, weights(v), v[d]); };

  LogisticFit fit;
  double f_x = total(x);
  if (options.record_trace) fit.objective_trace.push_back(f_x);

  double lipschitz = 1.0;
  double t = 1.0;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    double g_b = 0.0;
    smooth_gradient(p, weights(y), y[d], weights(grad), g_b);
    grad[d] = g_b;
    const double f_y = smooth(y);

    double f_z = 0.0;
    while (true) {
      const double step = 1.0 / lipschitz;
      for (std::size_t j = 0; j < d; ++j) {
        double v = y[j] - step * grad[j];
        double shrink = step * l1;
        z[j] = v > shrink ? v - shrink : (v < -shrink ? v + shrink : 0.0);
      }
      z[d] = y[d] - step * grad[d];
      f_z = smooth(z);
      double model = f_y;
      double dist2 = 0.0;
      for (std::size_t j = 0; j <= d; ++j) {
        double diff = z[j] - y[j];
        model += grad[j] * diff;
        dist2 += diff * diff;
      }
      model += 0.5 * lipschitz * dist2;
      if (f_z <= model + 1e-12 * std::abs(model) || lipschitz > 1e300) break;
      lipschitz *= 2.0;
    }

    const double F_z = f_z + l1 * l1_norm(weights(z));
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    x_prev = x;
    const bool accepted = F_z <= f_x;
    const double f_before = f_x;
    if (accepted) {
      x = z;
      f_x = F_z;
    }
    if (options.record_trace) fit.objective_trace.push_back(f_x);

    if (accepted) {
      for (std::size_t j = 0; j <= d; ++j) {
        y[j] = x[j] + (t - 1.0) / t_next * (x[j] - x_prev[j]);
      }
      t = t_next;
      if (f_before - f_x <= options.tolerance * std::max(1.0, std::abs(f_x))) {
        fit.converged = true;
        ++iter;
        break;
      }
    } else {
      // Momentum overshot: restart from the current iterate.
      y = x;
      t = 1.0;
    }
  }
  fit.state.weights.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(d));
  fit.state.intercept = x[d];
  fit.state.iterations = iter;
  return fit;
}

}  // namespace atrisk
