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

#include <string>
#include <vector>

#include "atrisk/data_model.hpp"
#include "atrisk/matrix.hpp"

namespace atrisk {

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column j pairs with values[j]
};

/// Cyclic Jacobi rotations; `a` must be symmetric.
SymmetricEigen jacobi_eigen(const Matrix& a, double tolerance = 1e-14, int max_sweeps = 100);

struct PcaModel {
  std::vector<double> mean;                   // d
  Matrix components;                          // d x r, orthonormal columns
  std::vector<double> explained_variance;     // r eigenvalues
  std::vector<double> explained_variance_ratio;

  std::size_t dimension() const { return mean.size(); }
  std::size_t rank() const { return components.cols(); }

  /// Zero mean and identity components.
  static PcaModel identity(std::size_t d);
};

/// Top-r eigenvectors of the sample covariance (divisor n - 1), each signed so
/// its largest-magnitude entry is positive.
PcaModel fit_pca(const Matrix& rows, std::size_t r);

Matrix transform(const PcaModel& model, const Matrix& rows);

/// mean + scores * components'
Matrix reconstruct(const PcaModel& model, const Matrix& scores);

/// Scatter CSV `pc1,pc2,label,synthetic,method` for a fitted 2-component model.
std::string scatter_to_csv(const PcaModel& model, const LabeledDataset& data, const std::string& method);

}  // namespace atrisk
