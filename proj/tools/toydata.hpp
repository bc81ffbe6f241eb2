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

// Synthetic saliency dataset: muted textured backgrounds with a few
// saturated objects. Fixations land mostly on the objects, with a bias
// toward ones near the centre, and partly on a centred Gaussian. Ground
// truth is the blurred fixation density.

#ifndef FOVEA_TOOLS_TOYDATA_HPP_
#define FOVEA_TOOLS_TOYDATA_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fovea/image_io.hpp"
#include "fovea/metrics.hpp"

namespace fovea::toy {

struct ToyConfig {
  int train = 60;
  int test = 20;
  int height = 240;
  int width = 320;
  int fixations = 60;             // per image
  double center_share = 0.25;     // fixations drawn from the central Gaussian
  double gt_sigma_fraction = 0.035;  // of the width
  std::uint64_t seed = 1;
};

struct ToyImage {
  Raster image;               // RGB
  Raster gt;                  // gray
  FixationMap fixations;      // image coordinates
};

ToyImage make_toy_image(const ToyConfig& cfg, int index);

/// Writes images/, gt/, fixations/ and manifest.tsv under `dir`; returns
/// the manifest path.
std::filesystem::path write_toy_dataset(const std::filesystem::path& dir, const ToyConfig& cfg);

}  // namespace fovea::toy

#endif  // FOVEA_TOOLS_TOYDATA_HPP_
