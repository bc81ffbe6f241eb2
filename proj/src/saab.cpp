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

#include "fovea/saab.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fovea/random.hpp"

namespace fovea {
namespace {

constexpr Index kChunkRows = 2048;

template <typename PixelAt>
RowMatrix<double> gather_patches(const Tensor& t, int k, Index count, PixelAt pixel_at) {
  const Index H = t.height(), W = t.width(), C = t.channels();
  const int lo = -(k - 1) / 2, hi = k / 2;
  RowMatrix<double> out(count, Index(k) * k * C);
  const double* src = t.matrix().data();
  for (Index r = 0; r < count; ++r) {
    const Index p = pixel_at(r);
    const Index y = p / W, x = p % W;
    double* dst = out.row(r).data();
    for (int dy = lo; dy <= hi; ++dy) {
      const Index sy = std::clamp<Index>(y + dy, 0, H - 1);
      for (int dx = lo; dx <= hi; ++dx) {
        const Index sx = std::clamp<Index>(x + dx, 0, W - 1);
        const double* s = src + (sy * W + sx) * C;
        std::copy(s, s + C, dst);
        dst += C;
      }
    }
  }
  return out;
}

// Removes each row's DC component: r - (r . dc) dc == r - mean(r).
void remove_dc(RowMatrix<double>& patches) {
  const Eigen::VectorXd means = patches.rowwise().mean();
  patches.colwise() -= means;
}

void validate(std::span<const Tensor> images, const SaabConfig& cfg) {
  if (images.empty()) throw InvalidArgument("fit_saab: no images");
  if (cfg.kernel_side < 1) throw InvalidArgument("fit_saab: kernel_side must be >= 1");
  if (cfg.stride != 1) throw InvalidArgument("fit_saab: only stride 1 is supported");
  const Index C = images[0].channels();
  for (const auto& im : images) {
    if (im.empty()) throw InvalidArgument("fit_saab: empty image");
    if (im.channels() != C) throw InvalidArgument("fit_saab: inconsistent channel counts");
  }
  const Index D = Index(cfg.kernel_side) * cfg.kernel_side * C;
  if (cfg.max_kept_channels < 0 || cfg.max_kept_channels > D)
    throw InvalidArgument("fit_saab: max_kept_channels must be in [0, k*k*C]");
  if (cfg.training_patch_cap < 1) throw InvalidArgument("fit_saab: training_patch_cap must be >= 1");
}

}  // namespace

RowMatrix<double> extract_patches(const Tensor& t, int kernel_side, Index first_pixel, Index count) {
  if (first_pixel < 0 || count < 0 || first_pixel + count > t.pixels())
    throw InvalidArgument("extract_patches: pixel range out of bounds");
  return gather_patches(t, kernel_side, count, [first_pixel](Index r) { return first_pixel + r; });
}

RowMatrix<double> extract_patches_at(const Tensor& t, int kernel_side, std::span<const Index> pixels) {
  for (Index p : pixels)
    if (p < 0 || p >= t.pixels()) throw InvalidArgument("extract_patches_at: pixel out of bounds");
  return gather_patches(t, kernel_side, static_cast<Index>(pixels.size()),
                        [&pixels](Index r) { return pixels[static_cast<size_t>(r)]; });
}

SaabKernelSet fit_saab(std::span<const Tensor> images, const SaabConfig& cfg) {
  validate(images, cfg);
  const int k = cfg.kernel_side;
  const Index C = images[0].channels();
  const Index D = Index(k) * k * C;

  std::int64_t total = 0;
  for (const auto& im : images) total += im.pixels();
  const auto picked = sample_indices(total, cfg.training_patch_cap, cfg.seed);
  const Index n = static_cast<Index>(picked.size());
  if (n < D + 1) {
    throw FitError("fit_saab: " + std::to_string(n) + " patches available, need at least " +
                   std::to_string(D + 1));
  }

  // Group the ascending global indices by image.
  std::vector<std::vector<Index>> per_image(images.size());
  {
    size_t img = 0;
    std::int64_t base = 0;
    for (auto g : picked) {
      while (g >= base + images[img].pixels()) base += images[img++].pixels();
      per_image[img].push_back(static_cast<Index>(g - base));
    }
  }

  // Visits DC-removed sampled patches in fixed-size chunks, image order.
  auto for_each_chunk = [&](auto&& fn) {
    for (size_t i = 0; i < images.size(); ++i) {
      const auto& px = per_image[i];
      for (size_t off = 0; off < px.size(); off += kChunkRows) {
        const size_t cnt = std::min<size_t>(kChunkRows, px.size() - off);
        RowMatrix<double> P = extract_patches_at(images[i], k, std::span<const Index>(px.data() + off, cnt));
        remove_dc(P);
        fn(P);
      }
    }
  };

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(D);
  for_each_chunk([&](const RowMatrix<double>& P) { mean += P.colwise().sum().transpose(); });
  mean /= double(n);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(D, D);
  for_each_chunk([&](RowMatrix<double>& P) {
    P.rowwise() -= mean.transpose();
    cov.selfadjointView<Eigen::Lower>().rankUpdate(P.transpose());
  });
  cov = cov.selfadjointView<Eigen::Lower>();
  cov /= double(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw FitError("fit_saab: eigendecomposition failed");
  const Eigen::VectorXd& evals = solver.eigenvalues();  // ascending
  const double top = std::max(evals(D - 1), 0.0);
  const double tol = std::max(1e-14, 1e-10 * top);

  Index limit = D - 1;
  if (cfg.max_kept_channels > 0) limit = std::min<Index>(limit, cfg.max_kept_channels - 1);

  SaabKernelSet out;
  out.kernel_side = k;
  out.input_channels = static_cast<int>(C);
  out.dc_kernel = Eigen::VectorXd::Constant(D, 1.0 / std::sqrt(double(D)));
  out.patch_mean = mean;

  std::vector<Index> keep;
  for (Index j = D - 1; j >= 0 && static_cast<Index>(keep.size()) < limit; --j) {
    if (evals(j) <= tol) break;
    keep.push_back(j);
  }
  out.ac_kernels.resize(static_cast<Index>(keep.size()), D);
  out.eigenvalues.resize(static_cast<Index>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) {
    Eigen::VectorXd v = solver.eigenvectors().col(keep[i]);
    v -= v.dot(out.dc_kernel) * out.dc_kernel;
    v.normalize();
    Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    out.ac_kernels.row(static_cast<Index>(i)) = v.transpose();
    out.eigenvalues(static_cast<Index>(i)) = evals(keep[i]);
  }
  return out;
}

Tensor apply_saab(const Tensor& t, const SaabKernelSet& kernels) {
  if (!kernels.fitted()) throw InvalidState("apply_saab: kernel set is not fitted");
  if (t.channels() != kernels.input_channels)
    throw InvalidArgument("apply_saab: tensor has " + std::to_string(t.channels()) +
                          " channels, kernels expect " + std::to_string(kernels.input_channels));
  const Index A = kernels.ac_kernels.rows();
  RowMatrix<double> out(t.pixels(), 1 + A);
  for (Index first = 0; first < t.pixels(); first += kChunkRows) {
    const Index cnt = std::min(kChunkRows, t.pixels() - first);
    const RowMatrix<double> P = extract_patches(t, kernels.kernel_side, first, cnt);
    out.block(first, 0, cnt, 1).noalias() = P * kernels.dc_kernel;
    if (A > 0) out.block(first, 1, cnt, A).noalias() = P * kernels.ac_kernels.transpose();
  }
  return Tensor(t.height(), t.width(), std::move(out));
}

}  // namespace fovea
