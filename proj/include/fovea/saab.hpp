// Copyright 2026 The Fovea Authors. All Rights Reserved.
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

// Saab transform: a constant DC kernel plus mean-removed PCA (AC kernels)
// over sliding k x k x C patches with stride 1 and replicate padding.
//
// Patch layout: a patch at pixel (y, x) covers rows y + dy and columns
// x + dx for dy, dx in [-(k-1)/2, k/2], i.e. centred for odd k and anchored
// at the top-left for k = 2. The flattened vector is ordered (dy, dx, c)
// with channels fastest, matching the channel-last tensor layout.
//
// AC kernels are orthogonal to the DC kernel, so projecting a raw patch
// equals projecting its DC-removed residual; a constant patch has zero AC
// response. The training mean only centres the covariance during fitting.
// Coefficients are signed; no bias offset is added to make them positive.

#ifndef FOVEA_SAAB_HPP_
#define FOVEA_SAAB_HPP_

#include <cstdint>
#include <span>

#include "fovea/tensor.hpp"

namespace fovea {

struct SaabConfig {
  int kernel_side = 3;
  int stride = 1;
  /// Total output channels, DC included. 0 keeps every positive-variance kernel.
  int max_kept_channels = 0;
  std::int64_t training_patch_cap = 200000;
  std::uint64_t seed = 0;
};

struct SaabKernelSet {
  int kernel_side = 0;
  int input_channels = 0;
  Eigen::VectorXd dc_kernel;    // length D = k*k*C, entries 1/sqrt(D)
  Eigen::MatrixXd ac_kernels;   // rows are orthonormal AC kernels, D columns
  Eigen::VectorXd eigenvalues;  // one per AC kernel, nonincreasing
  Eigen::VectorXd patch_mean;   // mean of DC-removed training patches (fit statistic)

  bool fitted() const { return kernel_side > 0; }
  Index patch_dim() const { return Index(kernel_side) * kernel_side * input_channels; }
  Index output_channels() const { return 1 + ac_kernels.rows(); }
};

/// Patch matrix for rows [first_pixel, first_pixel + count) of `t`, one
/// flattened patch per row.
RowMatrix<double> extract_patches(const Tensor& t, int kernel_side, Index first_pixel, Index count);

inline RowMatrix<double> extract_patches(const Tensor& t, int kernel_side) {
  return extract_patches(t, kernel_side, 0, t.pixels());
}

/// Patch matrix for an arbitrary list of pixel indices.
RowMatrix<double> extract_patches_at(const Tensor& t, int kernel_side, std::span<const Index> pixels);

/// Fits DC + AC kernels on patches sampled uniformly (seeded) from all
/// images, capped at cfg.training_patch_cap.
SaabKernelSet fit_saab(std::span<const Tensor> images, const SaabConfig& cfg);

/// Channel 0 = DC coefficient, channels 1.. = AC coefficients. Linear in `t`.
Tensor apply_saab(const Tensor& t, const SaabKernelSet& kernels);

}  // namespace fovea

#endif  // FOVEA_SAAB_HPP_
