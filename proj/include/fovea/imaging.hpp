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

// Resampling and filtering primitives on PlaneTensor.
//
// Every operation here is separable and is expressed as a pair of 1-D tap
// tables (one per axis) fed to apply_separable(). Borders are replicated by
// clamping source indices inside the tap tables.

#ifndef FOVEA_IMAGING_HPP_
#define FOVEA_IMAGING_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "fovea/tensor.hpp"

namespace fovea {

inline constexpr Index kInputHeight = 480;
inline constexpr Index kInputWidth = 640;

/// Pyramid levels, named by their downsampling factor.
enum class Level : int { d4 = 4, d8 = 8, d16 = 16, d32 = 32, d64 = 64 };

inline constexpr std::array<Level, 5> kLevels = {Level::d4, Level::d8, Level::d16, Level::d32,
                                                 Level::d64};

struct Resolution {
  Index rows = 0;
  Index cols = 0;
  friend bool operator==(const Resolution&, const Resolution&) = default;
};

inline int level_index(Level l) {
  switch (l) {
    case Level::d4: return 0;
    case Level::d8: return 1;
    case Level::d16: return 2;
    case Level::d32: return 3;
    case Level::d64: return 4;
  }
  return 0;
}

inline const char* level_name(Level l) {
  switch (l) {
    case Level::d4: return "d4";
    case Level::d8: return "d8";
    case Level::d16: return "d16";
    case Level::d32: return "d32";
    case Level::d64: return "d64";
  }
  return "?";
}

/// Resolution after repeated ceil-halving of the 480x640 input.
inline Resolution level_resolution(Level l) {
  Resolution r{kInputHeight, kInputWidth};
  for (int f = 1; f < static_cast<int>(l); f *= 2) {
    r.rows = (r.rows + 1) / 2;
    r.cols = (r.cols + 1) / 2;
  }
  return r;
}

template <typename Scalar>
using TapTable = std::vector<std::vector<std::pair<Index, Scalar>>>;

/// out(y, x, c) = sum_i sum_j rows[y][i].w * cols[x][j].w * in(rows[y][i].idx, cols[x][j].idx, c)
template <typename Scalar>
PlaneTensor<Scalar> apply_separable(const PlaneTensor<Scalar>& in, const TapTable<Scalar>& row_taps,
                                    const TapTable<Scalar>& col_taps) {
  const Index C = in.channels(), W = in.width();
  const Index H2 = static_cast<Index>(row_taps.size()), W2 = static_cast<Index>(col_taps.size());
  RowMatrix<Scalar> tmp = RowMatrix<Scalar>::Zero(H2 * W, C);
  for (Index y = 0; y < H2; ++y) {
    for (const auto& [sy, w] : row_taps[y]) {
      tmp.middleRows(y * W, W) += w * in.matrix().middleRows(sy * W, W);
    }
  }
  RowMatrix<Scalar> out = RowMatrix<Scalar>::Zero(H2 * W2, C);
  for (Index y = 0; y < H2; ++y) {
    for (Index x = 0; x < W2; ++x) {
      auto dst = out.row(y * W2 + x);
      for (const auto& [sx, w] : col_taps[x]) dst += w * tmp.row(y * W + sx);
    }
  }
  return PlaneTensor<Scalar>(H2, W2, std::move(out));
}

namespace detail {

template <typename Scalar>
TapTable<Scalar> pool2_taps(Index src) {
  TapTable<Scalar> taps(static_cast<size_t>((src + 1) / 2));
  for (Index o = 0; o < static_cast<Index>(taps.size()); ++o) {
    const Index a = 2 * o, b = std::min(2 * o + 1, src - 1);
    taps[o] = {{a, Scalar(0.5)}, {b, Scalar(0.5)}};
  }
  return taps;
}

template <typename Scalar>
TapTable<Scalar> align_corners_taps(Index src, Index dst) {
  TapTable<Scalar> taps(static_cast<size_t>(dst));
  for (Index o = 0; o < dst; ++o) {
    if (src == 1 || dst == 1) {
      taps[o] = {{0, Scalar(1)}};
      continue;
    }
    // Exact rational position o * (src-1) / (dst-1) split into integer and fraction.
    const Index num = o * (src - 1);
    const Index i0 = num / (dst - 1);
    const Scalar frac = Scalar(num % (dst - 1)) / Scalar(dst - 1);
    if (frac == Scalar(0) || i0 + 1 >= src) {
      taps[o] = {{i0, Scalar(1)}};
    } else {
      taps[o] = {{i0, Scalar(1) - frac}, {i0 + 1, frac}};
    }
  }
  return taps;
}

// Box-integration weights for shrinking, half-pixel bilinear for growing.
template <typename Scalar>
TapTable<Scalar> resize_taps(Index src, Index dst) {
  TapTable<Scalar> taps(static_cast<size_t>(dst));
  const double scale = static_cast<double>(src) / static_cast<double>(dst);
  for (Index o = 0; o < dst; ++o) {
    if (dst <= src) {
      const double lo = o * scale, hi = (o + 1) * scale;
      for (Index s = static_cast<Index>(std::floor(lo)); s < src && s < hi; ++s) {
        const double overlap = std::min(hi, double(s + 1)) - std::max(lo, double(s));
        if (overlap > 1e-12) taps[o].emplace_back(s, Scalar(overlap / scale));
      }
    } else {
      double pos = std::clamp((o + 0.5) * scale - 0.5, 0.0, double(src - 1));
      const Index i0 = static_cast<Index>(std::floor(pos));
      const double frac = pos - i0;
      if (frac <= 0.0 || i0 + 1 >= src) {
        taps[o] = {{i0, Scalar(1)}};
      } else {
        taps[o] = {{i0, Scalar(1.0 - frac)}, {i0 + 1, Scalar(frac)}};
      }
    }
  }
  return taps;
}

template <typename Scalar>
TapTable<Scalar> convolve_taps(Index n, const std::vector<Scalar>& kernel) {
  const Index k = static_cast<Index>(kernel.size());
  TapTable<Scalar> taps(static_cast<size_t>(n));
  for (Index o = 0; o < n; ++o) {
    taps[o].reserve(kernel.size());
    for (Index i = 0; i < k; ++i) {
      taps[o].emplace_back(std::clamp<Index>(o + i - k / 2, 0, n - 1), kernel[i]);
    }
  }
  return taps;
}

}  // namespace detail

/// 2x2 average pooling; an odd trailing row/column is replicated first.
template <typename Scalar>
PlaneTensor<Scalar> downsample2(const PlaneTensor<Scalar>& t) {
  return apply_separable(t, detail::pool2_taps<Scalar>(t.height()), detail::pool2_taps<Scalar>(t.width()));
}

/// Applies downsample2 until the input has the resolution of `level`,
/// starting from the full 480x640 input.
template <typename Scalar>
PlaneTensor<Scalar> downsample_to_level(const PlaneTensor<Scalar>& full, Level level) {
  if (full.height() != kInputHeight || full.width() != kInputWidth)
    throw InvalidArgument("downsample_to_level: input must be 480x640");
  PlaneTensor<Scalar> t = full;
  for (int f = 1; f < static_cast<int>(level); f *= 2) t = downsample2(t);
  return t;
}

/// Bilinear upsampling with corner alignment.
template <typename Scalar>
PlaneTensor<Scalar> upsample_to(const PlaneTensor<Scalar>& t, Resolution target) {
  if (target.rows < t.height() || target.cols < t.width())
    throw InvalidArgument("upsample_to: target smaller than source");
  return apply_separable(t, detail::align_corners_taps<Scalar>(t.height(), target.rows),
                         detail::align_corners_taps<Scalar>(t.width(), target.cols));
}

/// General resize used at ingestion (area when shrinking, bilinear when growing).
template <typename Scalar>
PlaneTensor<Scalar> resize(const PlaneTensor<Scalar>& t, Resolution target) {
  if (target.rows < 1 || target.cols < 1) throw InvalidArgument("resize: empty target");
  if (target.rows == t.height() && target.cols == t.width()) return t;
  return apply_separable(t, detail::resize_taps<Scalar>(t.height(), target.rows),
                         detail::resize_taps<Scalar>(t.width(), target.cols));
}

/// Sampled, unit-sum 1-D Gaussian. Tap i sits at offset i - side/2; for even
/// sides the profile is centred half a pixel before the anchor.
template <typename Scalar>
std::vector<Scalar> gaussian_kernel(int side, Scalar sigma) {
  if (side < 1) throw InvalidArgument("gaussian_kernel: side must be >= 1");
  if (!(sigma > Scalar(0))) throw InvalidArgument("gaussian_kernel: sigma must be positive");
  std::vector<Scalar> k(static_cast<size_t>(side));
  const Scalar centre = Scalar(side - 1) / Scalar(2);
  Scalar sum = 0;
  for (int i = 0; i < side; ++i) {
    const Scalar d = Scalar(i) - centre;
    k[i] = std::exp(-d * d / (Scalar(2) * sigma * sigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

template <typename Scalar>
PlaneTensor<Scalar> gaussian_blur(const PlaneTensor<Scalar>& t, int kernel_side, Scalar sigma) {
  const auto k = gaussian_kernel<Scalar>(kernel_side, sigma);
  return apply_separable(t, detail::convolve_taps<Scalar>(t.height(), k),
                         detail::convolve_taps<Scalar>(t.width(), k));
}

}  // namespace fovea

#endif  // FOVEA_IMAGING_HPP_
