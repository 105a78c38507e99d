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

#include "atrisk/svm.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "atrisk/error.hpp"

namespace atrisk {

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const {
  if (kind == KernelKind::linear) return dot(a, b);
  return std::exp(-gamma * squared_distance(a, b));
}

double default_gamma(const Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n == 0 || d == 0) return 1.0;
  double total = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
    total += var / static_cast<double>(n);
  }
  const double mean_var = total / static_cast<double>(d);
  return mean_var > 0.0 ? 1.0 / (static_cast<double>(d) * mean_var) : 1.0;
}

SmoSolution solve_smo(const Matrix& x, std::span<const double> y, const Kernel& kernel, const SmoOptions& options) {
  const std::size_t n = x.rows();
  if (y.size() != n) throw InvalidArgument("label count does not match row count");
  if (!(options.C > 0.0)) throw InvalidArgument(fmt::format("C must be > 0, got {}", options.C));
  constexpr double kTau = 1e-12;
  const double C = options.C;

  // Q_ij = y_i y_j K(x_i, x_j), kept whole: training sets here are a few hundred rows.
  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v = y[i] * y[j] * kernel(x.row(i), x.row(j));
      q(i, j) = v;
      q(j, i) = v;
    }
  }

  SmoSolution sol;
  sol.alpha.assign(n, 0.0);
  auto& alpha = sol.alpha;
  std::vector<double> grad(n, -1.0);
  auto upper = [&](std::size_t t) { return alpha[t] >= C; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    double g_max = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!upper(t) && -grad[t] >= g_max) {
          g_max = -grad[t];
          i_sel = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!lower(t) && grad[t] >= g_max) {
        g_max = grad[t];
        i_sel = static_cast<std::ptrdiff_t>(t);
      }
    }
    double g_max2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::ptrdiff_t j_sel = -1;
    if (i_sel >= 0) {
      const auto i = static_cast<std::size_t>(i_sel);
      for (std::size_t t = 0; t < n; ++t) {
        double grad_diff = 0.0;
        if (y[t] > 0) {
          if (lower(t)) continue;
          grad_diff = g_max + grad[t];
          g_max2 = std::max(g_max2, grad[t]);
        } else {
          if (upper(t)) continue;
          grad_diff = g_max - grad[t];
          g_max2 = std::max(g_max2, -grad[t]);
        }
        if (grad_diff > 0.0) {
          // q(i,t) carries y_i y_t, so this is K_ii + K_tt - 2 K_it.
          double quad = q(i, i) + q(t, t) - 2.0 * y[i] * y[t] * q(i, t);
          if (quad <= 0.0) quad = kTau;
          double obj = -(grad_diff * grad_diff) / quad;
          if (obj <= best_obj) {
            best_obj = obj;
            j_sel = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    if (i_sel < 0 || j_sel < 0 || g_max + g_max2 < options.tolerance) {
      sol.converged = true;
      break;
    }

    const auto i = static_cast<std::size_t>(i_sel);
    const auto j = static_cast<std::size_t>(j_sel);
    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t k = 0; k < n; ++k) grad[k] += q(i, k) * di + q(j, k) * dj;
  }
  sol.iterations = iter;

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  if (!std::isfinite(rho)) rho = 0.0;
  sol.bias = -rho;
  return sol;
}

namespace {

double platt_objective(std::span<const double> f, std::span<const double> t, double a, double b) {
  double value = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double z = f[i] * a + b;
    value += z >= 0.0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
  }
  return value;
}

}  // namespace

PlattLink fit_platt(std::span<const double> decision_values, std::span<const double> y) {
  const std::size_t n = decision_values.size();
  double n_pos = 0.0, n_neg = 0.0;
  for (double v : y) (v > 0 ? n_pos : n_neg) += 1.0;
  const double hi = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo = 1.0 / (n_neg + 2.0);
  std::vector<double> target(n);
  for (std::size_t i = 0; i < n; ++i) target[i] = y[i] > 0 ? hi : lo;

  PlattLink link{0.0, std::log((n_neg + 1.0) / (n_pos + 1.0))};
  double fval = platt_objective(decision_values, target, link.a, link.b);
  constexpr double kSigma = 1e-12, kMinStep = 1e-10, kEps = 1e-5;
  for (int iter = 0; iter < 100; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = decision_values[i];
      const double z = f * link.a + link.b;
      double p, q;
      if (z >= 0.0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += f * f * d2;
      h22 += d2;
      h21 += f * d2;
      const double d1 = target[i] - p;
      g1 += f * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = link.a + step * da, nb = link.b + step * db;
      const double nf = platt_objective(decision_values, target, na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        link = {na, nb};
        fval = nf;
        break;
      }
      step *= 0.5;
    }
    if (step < kMinStep) break;
  }
  return link;
}

double platt_probability(const PlattLink& link, double decision_value) {
  const double z = decision_value * link.a + link.b;
  return z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
}

double svm_decision(const SvmState& state, std::span<const double> row) {
  double sum = state.bias;
  for (std::size_t i = 0; i < state.support.rows(); ++i) {
    sum += state.coefficients[i] * state.kernel(state.support.row(i), row);
  }
  return sum;
}

}  // namespace atrisk
