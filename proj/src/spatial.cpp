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

#include "fovea/spatial.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "fovea/random.hpp"

namespace fovea {

Tensor center_prior(Index height, Index width, const CenterPriorConfig& cfg) {
  if (height < 1 || width < 1) throw InvalidArgument("center_prior: empty grid");
  if (!(cfg.sigma > 0)) throw InvalidArgument("center_prior: sigma must be positive");
  const auto [cx, cy] = cfg.center.value_or(std::pair{(width - 1) / 2.0, (height - 1) / 2.0});
  const double s2 = cfg.sigma * cfg.sigma;
  Tensor out(height, width, 1);
  for (Index y = 0; y < height; ++y) {
    for (Index x = 0; x < width; ++x) {
      const double dx = cx - double(x), dy = cy - double(y);
      out(y, x) = std::exp(-(dx * dx + dy * dy) / s2);
    }
  }
  return out;
}

Tensor center_prior_scaled(Index height, Index width, double sigma_fraction) {
  return center_prior(height, width, {sigma_fraction * double(std::min(height, width)), std::nullopt});
}

Tensor edge_map(const Tensor& luma, const EdgeConfig& cfg) {
  if (luma.channels() != 1) throw InvalidArgument("edge_map: luma must be single-channel");
  if (!(cfg.low_threshold > 0 && cfg.low_threshold < cfg.high_threshold))
    throw InvalidArgument("edge_map: need 0 < low_threshold < high_threshold");
  const Index H = luma.height(), W = luma.width();

  const int side = 2 * static_cast<int>(std::ceil(3.0 * cfg.smoothing_sigma)) + 1;
  const Tensor s = gaussian_blur(luma, side, cfg.smoothing_sigma);
  auto at = [&](Index y, Index x) {
    return s(std::clamp<Index>(y, 0, H - 1), std::clamp<Index>(x, 0, W - 1));
  };

  Eigen::MatrixXd mag(H, W);
  Eigen::MatrixXi dir(H, W);
  for (Index y = 0; y < H; ++y) {
    for (Index x = 0; x < W; ++x) {
      const double gx = ((at(y - 1, x + 1) + 2 * at(y, x + 1) + at(y + 1, x + 1)) -
                         (at(y - 1, x - 1) + 2 * at(y, x - 1) + at(y + 1, x - 1))) / 8.0;
      const double gy = ((at(y + 1, x - 1) + 2 * at(y + 1, x) + at(y + 1, x + 1)) -
                         (at(y - 1, x - 1) + 2 * at(y - 1, x) + at(y - 1, x + 1))) / 8.0;
      mag(y, x) = std::hypot(gx, gy);
      // Quantize the gradient direction to 0, 45, 90, 135 degrees.
      double deg = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
      if (deg < 0) deg += 180.0;
      dir(y, x) = static_cast<int>(std::floor((deg + 22.5) / 45.0)) % 4;
    }
  }

  // Neighbour offsets (dy, dx) along each quantized direction.
  static constexpr int kStep[4][2] = {{0, 1}, {1, 1}, {1, 0}, {1, -1}};
  constexpr double kTieEps = 1e-9;
  auto mag_at = [&](Index y, Index x) {
    return mag(std::clamp<Index>(y, 0, H - 1), std::clamp<Index>(x, 0, W - 1));
  };
  Eigen::MatrixXd thin = Eigen::MatrixXd::Zero(H, W);
  for (Index y = 0; y < H; ++y) {
    for (Index x = 0; x < W; ++x) {
      const double m = mag(y, x);
      if (m <= 0) continue;
      const int d = dir(y, x);
      const double prev = mag_at(y - kStep[d][0], x - kStep[d][1]);
      const double next = mag_at(y + kStep[d][0], x + kStep[d][1]);
      // Plateaus of equal magnitude keep only their far end.
      if (m >= prev - kTieEps * m && m > next + kTieEps * m) thin(y, x) = m;
    }
  }

  Tensor out(H, W, 1);
  std::vector<std::pair<Index, Index>> stack;
  for (Index y = 0; y < H; ++y)
    for (Index x = 0; x < W; ++x)
      if (thin(y, x) >= cfg.high_threshold && out(y, x) == 0) {
        out(y, x) = 1;
        stack.emplace_back(y, x);
      }
  while (!stack.empty()) {
    const auto [y, x] = stack.back();
    stack.pop_back();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const Index ny = y + dy, nx = x + dx;
        if (ny < 0 || ny >= H || nx < 0 || nx >= W || out(ny, nx) != 0) continue;
        if (thin(ny, nx) >= cfg.low_threshold) {
          out(ny, nx) = 1;
          stack.emplace_back(ny, nx);
        }
      }
    }
  }
  return out;
}

Tensor local_saab_features(const Tensor& down_img, const SaabKernelSet& stage1, const SaabKernelSet& stage2) {
  if (!stage1.fitted() || !stage2.fitted()) throw InvalidState("local_saab_features: kernels not fitted");
  if (stage1.kernel_side != 2 || stage2.kernel_side != 3)
    throw InvalidArgument("local_saab_features: expects 2x2 then 3x3 kernels");
  if (stage2.input_channels != stage1.output_channels())
    throw InvalidArgument("local_saab_features: stage widths do not chain");
  return apply_saab(apply_saab(down_img, stage1), stage2);
}

SpatialModule fit_spatial(Level level, std::span<const Tensor> level_images, const SpatialConfig& cfg,
                          std::uint64_t seed) {
  SpatialModule m;
  m.level = level;
  m.edge = cfg.edge;
  m.prior_sigma_fraction = cfg.prior_sigma_fraction;
  SaabConfig s1{2, 1, cfg.stage1_keep, cfg.patch_cap, derive_seed(seed, {1})};
  m.stage1 = fit_saab(level_images, s1);
  std::vector<Tensor> mid;
  mid.reserve(level_images.size());
  for (const auto& im : level_images) mid.push_back(apply_saab(im, m.stage1));
  SaabConfig s2{3, 1, std::min<int>(cfg.stage2_keep, static_cast<int>(9 * m.stage1.output_channels())),
                cfg.patch_cap, derive_seed(seed, {2})};
  m.stage2 = fit_saab(mid, s2);
  return m;
}

Tensor spatial_feature_stack(Level level, const Tensor& img, const SpatialModule& module) {
  const Resolution r = level_resolution(level);
  if (img.height() != r.rows || img.width() != r.cols)
    throw InvalidArgument(std::string("spatial_feature_stack: image is not at ") + level_name(level) +
                          " resolution");
  if (module.level != level) throw InvalidArgument("spatial_feature_stack: module fitted for another level");
  const Tensor local = local_saab_features(img, module.stage1, module.stage2);
  const Tensor luma(img.height(), img.width(), RowMatrix<double>(img.matrix().col(0)));
  const Tensor edges = edge_map(luma, module.edge);
  const Tensor prior = center_prior_scaled(img.height(), img.width(), module.prior_sigma_fraction);
  const Tensor* parts[] = {&local, &edges, &prior};
  return concat_channels<double>(std::span<const Tensor* const>(parts));
}

}  // namespace fovea
