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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "fovea/image_io.hpp"
#include "fovea/imaging.hpp"
#include "test_util.hpp"

namespace fovea {
namespace {

using testing::random_tensor;
using testing::scratch_dir;

TEST(Levels, ResolutionsFollowCeilHalving) {
  const Resolution want[] = {{120, 160}, {60, 80}, {30, 40}, {15, 20}, {8, 10}};
  for (int l = 0; l < 5; ++l) {
    EXPECT_EQ(level_resolution(kLevels[l]).rows, want[l].rows);
    EXPECT_EQ(level_resolution(kLevels[l]).cols, want[l].cols);
  }
}

TEST(Downsample, MatchesBlockAverageWithReplicatedTail) {
  const Tensor t = random_tensor(15, 7, 2, 3);
  const Tensor d = downsample2(t);
  ASSERT_EQ(d.height(), 8);
  ASSERT_EQ(d.width(), 4);
  for (Index y = 0; y < 8; ++y)
    for (Index x = 0; x < 4; ++x)
      for (Index c = 0; c < 2; ++c) {
        double s = 0;
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) s += t(std::min<Index>(2 * y + dy, 14), std::min<Index>(2 * x + dx, 6), c);
        EXPECT_NEAR(d(y, x, c), s / 4, 1e-15);
      }
}

TEST(Downsample, ToLevelRejectsWrongInputSize) {
  EXPECT_THROW(downsample_to_level(Tensor(100, 100, 1), Level::d8), InvalidArgument);
  EXPECT_EQ(downsample_to_level(Tensor(480, 640, 1), Level::d64).height(), 8);
}

TEST(Upsample, AlignCornersBilinearOracle) {
  const Tensor t = random_tensor(4, 5, 1, 9);
  const Tensor u = upsample_to(t, {10, 13});
  for (Index y = 0; y < 10; ++y)
    for (Index x = 0; x < 13; ++x) {
      const double sy = y * 3.0 / 9.0, sx = x * 4.0 / 12.0;
      const Index y0 = std::min<Index>(static_cast<Index>(sy), 2), x0 = std::min<Index>(static_cast<Index>(sx), 3);
      const double fy = sy - y0, fx = sx - x0;
      const double v = (1 - fy) * ((1 - fx) * t(y0, x0) + fx * t(y0, x0 + 1)) +
                       fy * ((1 - fx) * t(y0 + 1, x0) + fx * t(y0 + 1, x0 + 1));
      EXPECT_NEAR(u(y, x), v, 1e-13);
    }
  EXPECT_DOUBLE_EQ(u(0, 0), t(0, 0));
  EXPECT_DOUBLE_EQ(u(9, 12), t(3, 4));
  EXPECT_THROW(upsample_to(t, {3, 5}), InvalidArgument);
}

TEST(Resize, ShrinkByTwoEqualsPooling) {
  const Tensor t = random_tensor(8, 6, 3, 5);
  const Tensor r = resize(t, {4, 3});
  const Tensor p = downsample2(t);
  EXPECT_LT((r.matrix() - p.matrix()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Gaussian, KernelIsNormalizedAndSymmetric) {
  for (int side : {1, 4, 7, 10}) {
    const auto k = gaussian_kernel(side, 2.5);
    double s = 0;
    for (double v : k) s += v;
    EXPECT_NEAR(s, 1.0, 1e-15);
    for (int i = 0; i < side; ++i) EXPECT_NEAR(k[i], k[side - 1 - i], 1e-16);
  }
  EXPECT_THROW(gaussian_kernel(0, 1.0), InvalidArgument);
  EXPECT_THROW(gaussian_kernel(3, 0.0), InvalidArgument);
}

TEST(Gaussian, SeparableBlurMatchesDirect2DConvolution) {
  const Tensor t = random_tensor(9, 11, 1, 17);
  for (int side : {5, 10}) {
    const auto k = gaussian_kernel(side, 2.5);
    const Tensor b = gaussian_blur(t, side, 2.5);
    for (Index y = 0; y < 9; ++y)
      for (Index x = 0; x < 11; ++x) {
        double s = 0;
        for (int i = 0; i < side; ++i)
          for (int j = 0; j < side; ++j) {
            const Index yy = std::clamp<Index>(y + i - side / 2, 0, 8);
            const Index xx = std::clamp<Index>(x + j - side / 2, 0, 10);
            s += k[i] * k[j] * t(yy, xx);
          }
        EXPECT_NEAR(b(y, x), s, 1e-14);
      }
  }
}

TEST(Yuv, KnownColours) {
  Raster r{1, 3, 3, {255, 255, 255, 255, 0, 0, 0, 0, 0}};
  const Tensor t = raster_to_yuv(r);
  EXPECT_NEAR(t(0, 0, 0), 1.0, 1e-12);
  EXPECT_NEAR(t(0, 0, 1), 0.5, 1e-12);
  EXPECT_NEAR(t(0, 0, 2), 0.5, 1e-12);
  EXPECT_NEAR(t(0, 1, 0), 0.299, 1e-12);
  EXPECT_NEAR(t(0, 1, 1), 0.5 - 0.168736, 1e-12);
  EXPECT_NEAR(t(0, 1, 2), 1.0, 1e-12);
  EXPECT_NEAR(t(0, 2, 0), 0.0, 1e-12);
  Raster g{1, 1, 1, {51}};
  const Tensor tg = raster_to_yuv(g);
  EXPECT_NEAR(tg(0, 0, 0), 0.2, 1e-12);
  EXPECT_DOUBLE_EQ(tg(0, 0, 1), 0.5);
}

TEST(ImageIo, PngRoundTripAndLoadNormalize) {
  const auto dir = scratch_dir("imaging_png");
  Raster r{6, 8, 3, {}};
  for (int i = 0; i < 6 * 8 * 3; ++i) r.pixels.push_back(static_cast<std::uint8_t>(i * 7));
  write_png(dir / "a.png", r);
  const Raster back = read_image(dir / "a.png");
  EXPECT_EQ(back.height, 6);
  EXPECT_EQ(back.width, 8);
  EXPECT_EQ(back.channels, 3);
  EXPECT_EQ(back.pixels, r.pixels);
  const Resolution s = read_image_size(dir / "a.png");
  EXPECT_EQ(s.rows, 6);
  EXPECT_EQ(s.cols, 8);
  const Tensor t = load_and_normalize(dir / "a.png");
  EXPECT_EQ(t.height(), 480);
  EXPECT_EQ(t.width(), 640);
  EXPECT_EQ(t.channels(), 3);
}

TEST(ImageIo, MapPngQuantizes) {
  const auto dir = scratch_dir("imaging_map");
  Tensor m(2, 2, 1);
  m(0, 0) = 0.0;
  m(0, 1) = 1.0;
  m(1, 0) = 0.5;
  m(1, 1) = 2.0;
  write_map_png(dir / "m.png", m);
  const Raster r = read_image(dir / "m.png");
  ASSERT_EQ(r.channels, 1);
  EXPECT_EQ(r.pixels, (std::vector<std::uint8_t>{0, 255, 128, 255}));
  EXPECT_FALSE(std::filesystem::exists(dir / "m.png.tmp"));
}

TEST(ImageIo, CorruptFilesAreDecodeErrors) {
  const auto dir = scratch_dir("imaging_bad");
  {
    std::ofstream(dir / "junk.png") << "not an image at all";
  }
  EXPECT_THROW(read_image(dir / "junk.png"), DecodeError);
  {
    std::ofstream out(dir / "trunc.png", std::ios::binary);
    const unsigned char sig[] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n', 0, 0};
    out.write(reinterpret_cast<const char*>(sig), sizeof sig);
  }
  EXPECT_THROW(read_image(dir / "trunc.png"), DecodeError);
  {
    std::ofstream out(dir / "trunc.jpg", std::ios::binary);
    const unsigned char soi[] = {0xFF, 0xD8, 0xFF, 0xE0, 0, 0x10};
    out.write(reinterpret_cast<const char*>(soi), sizeof soi);
  }
  EXPECT_THROW(read_image(dir / "trunc.jpg"), DecodeError);
  EXPECT_THROW(read_image(dir / "missing.png"), DecodeError);
}

TEST(Tensor, ConstructionAndChannelOps) {
  EXPECT_THROW(Tensor(0, 3, 1), InvalidArgument);
  EXPECT_THROW(Tensor(2, 2, RowMatrix<double>(3, 1)), InvalidArgument);
  const Tensor a = random_tensor(3, 4, 2, 1), b = random_tensor(3, 4, 3, 2);
  const Tensor c = concat_channels(a, b);
  EXPECT_EQ(c.channels(), 5);
  EXPECT_EQ(c(2, 3, 4), b(2, 3, 2));
  const int pick[] = {4, 0};
  const Tensor s = select_channels<double>(c, pick);
  EXPECT_EQ(s(1, 1, 0), b(1, 1, 2));
  EXPECT_EQ(s(1, 1, 1), a(1, 1, 0));
  EXPECT_THROW(concat_channels(a, random_tensor(3, 5, 1, 3)), InvalidArgument);
  EXPECT_EQ(c.plane(3)(2, 1), b(2, 1, 1));
}

}  // namespace
}  // namespace fovea
