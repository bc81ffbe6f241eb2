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

// Multi-layer hybrid feature extraction.
//
// Five layers d4..d64. Each layer runs a 3x3 and a 5x5 Saab transform on
// the coefficients carried from the previous layer (d4 runs them on the YUV
// image). Between layers an RFT fitted against the pooled ground truth keeps
// the strongest channels of each Saab path, which are 2x pooled and carried
// on. d8, d16 and d32 additionally compute spatial features from the image
// downsampled to their resolution.
//
//   hybrid(d4)      = [saab3 | saab5]
//   hybrid(d8..d32) = [spatial | saab3 | saab5]
//   hybrid(d64)     = [saab3 | saab5]
//   set(dN)         = [pool2(hybrid(dN/2)) | hybrid(dN)]   for N = 8..64
//
// Every set lives at the deeper layer's resolution.

#ifndef FOVEA_PIPELINE_HPP_
#define FOVEA_PIPELINE_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fovea/imaging.hpp"
#include "fovea/rft.hpp"
#include "fovea/saab.hpp"
#include "fovea/spatial.hpp"

namespace fovea {

inline constexpr int kLayerCount = 5;
inline constexpr int kSetCount = 4;  // d8, d16, d32, d64

/// Sets are indexed 0..3 for d8..d64; set s combines layers s and s+1.
inline Level set_level(int set) { return kLevels[static_cast<size_t>(set + 1)]; }

struct PipelineConfig {
  // Total output channels (DC included) per Saab stage and layer; 0 = all.
  std::array<int, kLayerCount> saab3_keep = {27, 48, 64, 128, 64};
  std::array<int, kLayerCount> saab5_keep = {40, 48, 64, 128, 64};
  // Channels forwarded per Saab path after d8, d16, d32; 0 = all.
  std::array<int, 3> forward_keep = {20, 50, 100};
  // Fraction of pixels per image used for RFT and regressor fitting at each
  // level; the d4 entry applies to the ensemble head.
  std::array<double, kLayerCount> sample_fraction = {0.1, 0.25, 0.25, 1.0, 1.0};
  std::int64_t saab_patch_cap = 200000;
  int rft_bins = 16;
  SpatialConfig spatial;
};

/// Progress and timing messages emitted during fitting.
using FitLogger = std::function<void(const std::string&)>;

struct FitContext {
  std::uint64_t seed = 0;
  int jobs = 1;
  FitLogger log;

  void info(const std::string& msg) const {
    if (log) log(msg);
  }
};

struct LayerState {
  Level level = Level::d4;
  SaabKernelSet saab3;
  SaabKernelSet saab5;
  std::optional<SpatialModule> spatial;  // d8, d16, d32
  // d8, d16, d32 only: channels of saab3 / saab5 carried to the next layer.
  RftResult forward3;
  RftResult forward5;

  Index hybrid_channels() const;
};

struct FeaturePipeline {
  PipelineConfig config;
  std::array<LayerState, kLayerCount> layers;

  bool fitted() const;
  Index hybrid_channels(int layer) const { return layers[static_cast<size_t>(layer)].hybrid_channels(); }
  Index set_channels(int set) const { return hybrid_channels(set) + hybrid_channels(set + 1); }
};

/// Training image resampled to d4 plus its ground truth at every level.
struct TrainingSample {
  Tensor d4_image;                       // 120x160x3 YUV
  std::array<Tensor, kLayerCount> gt;    // single channel, d4..d64
};

TrainingSample make_training_sample(const Tensor& image480, const Tensor& gt480);

/// Pixel indices sampled from one image at `level`, seeded per image and purpose.
std::vector<Index> sample_pixels(Level level, double fraction, std::uint64_t seed, std::uint64_t purpose,
                                 std::uint64_t image_index);

FeaturePipeline fit_feature_pipeline(std::span<const TrainingSample> samples, const PipelineConfig& cfg,
                                     const FitContext& ctx);

/// Hybrid features of all five layers from the d4 image.
std::array<Tensor, kLayerCount> extract_hybrids(const Tensor& d4_image, const FeaturePipeline& pipeline);

struct FeatureSets {
  std::array<Tensor, kSetCount> sets;  // d8 (60x80), d16 (30x40), d32 (15x20), d64 (8x10)
};

FeatureSets extract_feature_sets_d4(const Tensor& d4_image, const FeaturePipeline& pipeline);

/// From the 480x640 YUV input.
FeatureSets extract_feature_sets(const Tensor& image480, const FeaturePipeline& pipeline);

/// Human-readable per-stage channel / resolution table.
std::string describe_shapes(const FeaturePipeline& pipeline);

}  // namespace fovea

#endif  // FOVEA_PIPELINE_HPP_
