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

// Per-layer spatial features computed straight from the downsampled image:
// a 2x2 -> 3x3 local Saab cascade, a Canny edge map and a Gaussian centre
// prior.

#ifndef FOVEA_SPATIAL_HPP_
#define FOVEA_SPATIAL_HPP_

#include <optional>
#include <span>

#include "fovea/imaging.hpp"
#include "fovea/saab.hpp"

namespace fovea {

struct CenterPriorConfig {
  double sigma = 1.0;
  /// (x, y) = (column, row); defaults to the grid centre ((w-1)/2, (h-1)/2).
  std::optional<std::pair<double, double>> center;
};

/// f(x, y) = exp(-((cx - x)^2 + (cy - y)^2) / sigma^2).
Tensor center_prior(Index height, Index width, const CenterPriorConfig& cfg);

/// Centre prior with sigma = fraction * min(h, w).
Tensor center_prior_scaled(Index height, Index width, double sigma_fraction);

/// Thresholds apply to the gradient magnitude of the smoothed luma, with
/// Sobel responses divided by 8 so they estimate the per-pixel derivative.
struct EdgeConfig {
  double low_threshold = 0.1;
  double high_threshold = 0.2;
  double smoothing_sigma = 1.4;
};

/// Canny detector: Gaussian smoothing, Sobel gradients, non-maximum
/// suppression over four directions, hysteresis with 8-connectivity.
/// Output is a {0,1} map.
Tensor edge_map(const Tensor& luma, const EdgeConfig& cfg);

Tensor local_saab_features(const Tensor& down_img, const SaabKernelSet& stage1, const SaabKernelSet& stage2);

struct SpatialConfig {
  int stage1_keep = 3;
  int stage2_keep = 9;
  EdgeConfig edge;
  double prior_sigma_fraction = 1.0 / 3.0;
  std::int64_t patch_cap = 200000;
};

/// Fitted spatial module of one layer.
struct SpatialModule {
  Level level = Level::d8;
  SaabKernelSet stage1;
  SaabKernelSet stage2;
  EdgeConfig edge;
  double prior_sigma_fraction = 1.0 / 3.0;

  Index channels() const { return stage2.output_channels() + 2; }
};

/// Fits both cascade stages on images already at the level's resolution.
SpatialModule fit_spatial(Level level, std::span<const Tensor> level_images, const SpatialConfig& cfg,
                          std::uint64_t seed);

/// [local Saab | edge | centre prior] at the level's resolution.
Tensor spatial_feature_stack(Level level, const Tensor& img, const SpatialModule& module);

}  // namespace fovea

#endif  // FOVEA_SPATIAL_HPP_
