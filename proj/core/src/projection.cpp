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

#include "atrisk/projection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "atrisk/csv.hpp"
#include "atrisk/error.hpp"

namespace atrisk {

SymmetricEigen jacobi_eigen(const Matrix& input, double tolerance, int max_sweeps) {
  const std::size_t d = input.rows();
  if (input.cols() != d) throw InvalidArgument("eigendecomposition needs a square matrix");
  Matrix a = input;
  Matrix v(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v(i, i) = 1.0;

  double frobenius = 0.0;
  for (double x : a.data()) frobenius += x * x;
  frobenius = std::sqrt(frobenius);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= tolerance * frobenius) break;

    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  SymmetricEigen out;
  out.values.resize(d);
  out.vectors = Matrix(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    out.values[j] = a(order[j], order[j]);
    for (std::size_t k = 0; k < d; ++k) out.vectors(k, j) = v(k, order[j]);
  }
  return out;
}

PcaModel PcaModel::identity(std::size_t d) {
  PcaModel m;
  m.mean.assign(d, 0.0);
  m.components = Matrix(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) m.components(i, i) = 1.0;
  m.explained_variance.assign(d, 1.0);
  m.explained_variance_ratio.assign(d, 1.0 / static_cast<double>(d));
  return m;
}

PcaModel fit_pca(const Matrix& rows, std::size_t r) {
  const std::size_t n = rows.rows(), d = rows.cols();
  if (n < 2) throw InvalidArgument("PCA needs at least 2 rows");
  if (r < 1 || r > std::min(n - 1, d)) {
    throw InvalidArgument(fmt::format("PCA rank {} must lie in [1, min(n-1, d)] = [1, {}]", r, std::min(n - 1, d)));
  }
  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += rows(i, j);
  for (auto& m : model.mean) m /= static_cast<double>(n);

  Matrix cov(d, d, 0.0);
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered[j] = rows(i, j) - model.mean[j];
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = j; k < d; ++k) cov(j, k) += centered[j] * centered[k];
  }
  double trace = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j; k < d; ++k) {
      cov(j, k) /= static_cast<double>(n - 1);
      cov(k, j) = cov(j, k);
    }
    trace += cov(j, j);
  }
  if (trace <= 0.0) throw InvalidArgument("PCA input is constant (zero covariance)");

  auto eig = jacobi_eigen(cov);
  model.components = Matrix(d, r);
  for (std::size_t c = 0; c < r; ++c) {
    std::size_t lead = 0;
    for (std::size_t k = 1; k < d; ++k) {
      if (std::abs(eig.vectors(k, c)) > std::abs(eig.vectors(lead, c))) lead = k;
    }
    const double sign = eig.vectors(lead, c) < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < d; ++k) model.components(k, c) = sign * eig.vectors(k, c);
    const double value = std::max(eig.values[c], 0.0);
    model.explained_variance.push_back(value);
    model.explained_variance_ratio.push_back(value / trace);
  }
  return model;
}

Matrix transform(const PcaModel& model, const Matrix& rows) {
  const std::size_t d = model.dimension(), r = model.rank();
  if (rows.cols() != d) {
    throw InvalidArgument(fmt::format("PCA model expects {} columns, got {}", d, rows.cols()));
  }
  Matrix scores(rows.rows(), r, 0.0);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double centered = rows(i, j) - model.mean[j];
      for (std::size_t c = 0; c < r; ++c) scores(i, c) += centered * model.components(j, c);
    }
  }
  return scores;
}

Matrix reconstruct(const PcaModel& model, const Matrix& scores) {
  const std::size_t d = model.dimension(), r = model.rank();
  if (scores.cols() != r) throw InvalidArgument(fmt::format("expected {} score columns, got {}", r, scores.cols()));
  Matrix out(scores.rows(), d);
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double v = model.mean[j];
      for (std::size_t c = 0; c < r; ++c) v += scores(i, c) * model.components(j, c);
      out(i, j) = v;
    }
  }
  return out;
}

std::string scatter_to_csv(const PcaModel& model, const LabeledDataset& data, const std::string& method) {
  if (model.rank() < 2) throw InvalidArgument("scatter export needs a model with at least 2 components");
  Matrix scores = transform(model, data.features());
  std::string out = "pc1,pc2,label,synthetic,method\n";
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    out += fmt::format("{},{},{},{},{}\n", csv::format_double(scores(i, 0)), csv::format_double(scores(i, 1)),
                       data.labels()[i] ? "true" : "false", data.synthetic_flags()[i] ? 1 : 0, method);
  }
  return out;
}

}  // namespace atrisk
