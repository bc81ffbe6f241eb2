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

// Multi-path saliency prediction.
//
// One map regressor per feature set. The coarse d64 and d32 maps are
// upsampled and corrected by residual regressors running on the d16 and d8
// sets respectively:
//
//   P8   = map8(d8)
//   P16  = map16(d16)
//   P64c = up(map64(d64) -> d16) + res16(d16)
//   P32c = up(map32(d32) -> d8)  + res8(d8)
//
// The four maps are fused at d4 by a regressor over 5x5 neighbourhoods and
// then post-processed to the 480x640 output.

#ifndef FOVEA_PREDICTION_HPP_
#define FOVEA_PREDICTION_HPP_

#include <array>
#include <functional>

#include "fovea/gbt.hpp"
#include "fovea/pipeline.hpp"
#include "fovea/rft.hpp"

namespace fovea {

struct PredictionConfig {
  std::array<int, kSetCount> head_keep = {500, 500, 1000, 1000};  // RFT keep per set, clamped to width
  GbtConfig gbt;
};

struct PostProcessConfig {
  double floor_quantile = 0.5;
  int blur_side = 10;
  double blur_sigma = 2.5;

  void validate() const;
};

/// RFT column selection followed by a regressor on the selected columns.
struct RegressionHead {
  RftResult rft;
  GbtModel model;

  bool fitted() const { return rft.fitted() && model.fitted(); }
  /// One prediction per pixel of `set`, as a map at the set's resolution.
  Tensor predict(const Tensor& set) const;
};

struct PathHeads {
  std::array<RegressionHead, kSetCount> map;  // d8, d16, d32, d64
  RegressionHead residual16;                  // corrects up(d64) on the d16 set
  RegressionHead residual8;                   // corrects up(d32) on the d8 set

  bool fitted() const;
};

inline constexpr int kEnsembleWindow = 5;
inline constexpr int kEnsembleMaps = 4;
inline constexpr int kEnsembleDims = kEnsembleMaps * kEnsembleWindow * kEnsembleWindow;

struct EnsembleHead {
  GbtModel model;
  bool fitted() const { return model.fitted(); }
};

struct PathMaps {
  Tensor s8, s16, s32, s64;  // direct map predictions at their set's resolution
  Tensor p8, p16, p32c, p64c;

  /// Ensemble inputs in fusion order.
  std::array<const Tensor*, kEnsembleMaps> fused_inputs() const { return {&p8, &p16, &p32c, &p64c}; }
};

/// Produces the feature sets of training image i on demand.
using FeatureSource = std::function<FeatureSets(size_t)>;

PathHeads fit_paths(size_t image_count, const FeatureSource& features, std::span<const TrainingSample> samples,
                    const PipelineConfig& pipeline_cfg, const PredictionConfig& cfg, const FitContext& ctx);

PathMaps predict_paths(const FeatureSets& sets, const PathHeads& heads);

/// Upsamples the four maps to d4 and lays out, per pixel, 4 x 5 x 5 values:
/// index = map * 25 + (dy + 2) * 5 + (dx + 2), borders replicated.
RowMatrix<double> ensemble_vectors(const std::array<const Tensor*, kEnsembleMaps>& maps);

EnsembleHead fit_ensemble(size_t image_count, const std::function<PathMaps(size_t)>& paths,
                          std::span<const TrainingSample> samples, const PipelineConfig& pipeline_cfg,
                          const PredictionConfig& cfg, const FitContext& ctx);

/// Fused map at d4 (120x160).
Tensor ensemble_fuse(const PathMaps& maps, const EnsembleHead& head);

/// Upsample to 480x640, floor values below the floor_quantile quantile to
/// that quantile, Gaussian blur, min-max normalize to [0,1] (constant -> 0).
Tensor post_process(const Tensor& map, const PostProcessConfig& cfg);

}  // namespace fovea

#endif  // FOVEA_PREDICTION_HPP_
