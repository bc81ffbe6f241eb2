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

#ifndef FOVEA_IMAGE_IO_HPP_
#define FOVEA_IMAGE_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fovea/imaging.hpp"
#include "fovea/tensor.hpp"

namespace fovea {

/// Decoded 8-bit raster, interleaved, 1 (gray) or 3 (RGB) channels.
struct Raster {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
};

/// Decodes PNG or JPEG (detected from the file signature). Alpha is dropped,
/// 16-bit PNG is reduced to 8 bits, palette and gray+alpha are expanded.
Raster read_image(const std::filesystem::path& path);

/// Reads only the image header.
Resolution read_image_size(const std::filesystem::path& path);

void write_png(const std::filesystem::path& path, const Raster& raster);

/// Full-range BT.601 RGB -> YUV on [0,1], chroma centred at 0.5. Gray
/// rasters map to Y = gray, U = V = 0.5.
Tensor raster_to_yuv(const Raster& raster);

/// Decodes, converts to YUV and resizes to 480x640x3.
Tensor load_and_normalize(const std::filesystem::path& path);

/// Decodes a ground-truth saliency map as one channel on [0,1] at 480x640.
/// Colour maps are reduced to their luma.
Tensor load_saliency_map(const std::filesystem::path& path);

/// Quantizes a single-channel map on [0,1] to 8 bits (values are clamped).
Raster map_to_raster(const Tensor& map);

/// Writes `map` as an 8-bit grayscale PNG via a temporary file and rename.
void write_map_png(const std::filesystem::path& path, const Tensor& map);

}  // namespace fovea

#endif  // FOVEA_IMAGE_IO_HPP_
