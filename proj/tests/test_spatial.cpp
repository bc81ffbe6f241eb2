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

#include "fovea/spatial.hpp"
#include "test_util.hpp"

namespace fovea {
namespace {

using testing::random_tensor;

Tensor step_image(Index h, Index w, double amplitude, bool vertical_edge = true) {
  Tensor t(h, w, 1);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) t(y, x) = (vertical_edge ? x >= w / 2 : y >= h / 2) ? amplitude : 0.0;
  return t;
}

// Peak gradient of a smoothed step under Sobel / 8: along the edge the
// image is constant, so it reduces to the central difference of the
// smoothed profile, a * (g(0) + g(1)) / 2 for the normalized Gaussian g.
double step_gradient_peak(double amplitude, double sigma) {
  const int half = static_cast<int>(std::ceil(3 * sigma));
  double s = 0;
  for (int i = -half; i <= half; ++i) s += std::exp(-i * i / (2 * sigma * sigma));
  return amplitude * (1.0 + std::exp(-1 / (2 * sigma * sigma))) / (2 * s);
}

TEST(Canny, StepEdgeLandsOnFirstColumnOfBrightSide) {
  const Tensor e = edge_map(step_image(12, 20, 1.0), EdgeConfig{});
  for (Index y = 0; y < 12; ++y)
    for (Index x = 0; x < 20; ++x) EXPECT_EQ(e(y, x), x == 10 ? 1.0 : 0.0) << y << "," << x;
}

TEST(Canny, HorizontalStep) {
  const Tensor e = edge_map(step_image(16, 10, 1.0, false), EdgeConfig{});
  for (Index y = 0; y < 16; ++y)
    for (Index x = 0; x < 10; ++x) EXPECT_EQ(e(y, x), y == 8 ? 1.0 : 0.0);
}

TEST(Canny, WeakStepBelowThresholdsVanishes) {
  const double peak = step_gradient_peak(1.0, 1.4);
  ASSERT_GT(peak, 0.2);
  const double weak = 0.09 / peak;  // peak gradient 0.09 < low
  const Tensor e = edge_map(step_image(10, 20, weak), EdgeConfig{});
  EXPECT_EQ(e.matrix().sum(), 0.0);
  const double strong = 0.25 / peak;
  EXPECT_EQ(edge_map(step_image(10, 20, strong), EdgeConfig{}).matrix().sum(), 10.0);
}

TEST(Canny, HysteresisKeepsWeakEdgesConnectedToStrongOnes) {
  EdgeConfig cfg;
  cfg.smoothing_sigma = 0.5;
  const double peak = step_gradient_peak(1.0, 0.5);
  // Vertical edge, strong in the top rows and weak (between the thresholds) below.
  Tensor t(30, 20, 1), weak_only(30, 20, 1);
  for (Index y = 0; y < 30; ++y)
    for (Index x = 10; x < 20; ++x) {
      t(y, x) = (y < 5 ? 0.3 : 0.15) / peak;
      weak_only(y, x) = 0.15 / peak;
    }
  const Tensor connected = edge_map(t, cfg);
  for (Index y = 0; y < 30; ++y) EXPECT_EQ(connected(y, 10), 1.0) << y;
  EXPECT_EQ(edge_map(weak_only, cfg).matrix().sum(), 0.0);
}

TEST(Canny, OutputIsBinaryAndValidatesInput) {
  const Tensor e = edge_map(random_tensor(20, 25, 1, 4), EdgeConfig{});
  for (double v : e.values()) EXPECT_TRUE(v == 0.0 || v == 1.0);
  EXPECT_EQ(edge_map(Tensor(8, 8, 1, 0.5), EdgeConfig{}).matrix().sum(), 0.0);
  EXPECT_THROW(edge_map(random_tensor(5, 5, 2, 1), EdgeConfig{}), InvalidArgument);
  EXPECT_THROW(edge_map(random_tensor(5, 5, 1, 1), EdgeConfig{0.3, 0.2, 1.4}), InvalidArgument);
}

TEST(CenterPrior, MatchesFormula) {
  const Tensor p = center_prior(15, 20, CenterPriorConfig{5.0, std::nullopt});
  for (Index y = 0; y < 15; ++y)
    for (Index x = 0; x < 20; ++x) {
      const double dx = 9.5 - x, dy = 7.0 - y;
      EXPECT_NEAR(p(y, x), std::exp(-(dx * dx + dy * dy) / 25.0), 1e-15);
    }
  EXPECT_DOUBLE_EQ(p(7, 9), p(7, 10));
  const Tensor q = center_prior(10, 10, CenterPriorConfig{2.0, std::pair{3.0, 4.0}});
  EXPECT_DOUBLE_EQ(q(4, 3), 1.0);
  const Tensor s = center_prior_scaled(30, 40, 1.0 / 3.0);
  EXPECT_NEAR(s(0, 0), std::exp(-(19.5 * 19.5 + 14.5 * 14.5) / 100.0), 1e-15);
  EXPECT_THROW(center_prior(0, 3, CenterPriorConfig{}), InvalidArgument);
  EXPECT_THROW(center_prior(3, 3, CenterPriorConfig{0.0, std::nullopt}), InvalidArgument);
}

TEST(SpatialModule, StackLayoutAndShapes) {
  std::vector<Tensor> images;
  for (int i = 0; i < 3; ++i) images.push_back(random_tensor(30, 40, 3, 50 + i));
  const SpatialModule m = fit_spatial(Level::d16, images, SpatialConfig{}, 3);
  EXPECT_EQ(m.stage1.kernel_side, 2);
  EXPECT_EQ(m.stage2.kernel_side, 3);
  EXPECT_EQ(m.stage1.output_channels(), 3);
  EXPECT_EQ(m.stage2.output_channels(), 9);
  EXPECT_EQ(m.channels(), 11);
  const Tensor s = spatial_feature_stack(Level::d16, images[0], m);
  ASSERT_EQ(s.channels(), 11);
  const Tensor luma(30, 40, RowMatrix<double>(images[0].matrix().col(0)));
  const Tensor edges = edge_map(luma, EdgeConfig{});
  const Tensor prior = center_prior_scaled(30, 40, 1.0 / 3.0);
  const Tensor local = local_saab_features(images[0], m.stage1, m.stage2);
  EXPECT_EQ(s.matrix().col(9), edges.matrix().col(0));
  EXPECT_EQ(s.matrix().col(10), prior.matrix().col(0));
  EXPECT_EQ(s.matrix().leftCols(9), local.matrix());
  EXPECT_THROW(spatial_feature_stack(Level::d8, images[0], m), InvalidArgument);
  EXPECT_THROW(local_saab_features(images[0], m.stage2, m.stage1), InvalidArgument);
  EXPECT_THROW(local_saab_features(images[0], SaabKernelSet{}, m.stage2), InvalidState);
}

}  // namespace
}  // namespace fovea
