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

#include "fovea/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "fovea/parallel.hpp"
#include "fovea/random.hpp"

namespace fovea {
namespace {

enum SeedTag : std::uint64_t { kSaab3 = 11, kSaab5 = 12, kSpatial = 13, kForwardSample = 14 };

bool has_spatial(int layer) { return layer >= 1 && layer <= 3; }
bool has_forward(int layer) { return layer >= 1 && layer <= 3; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int clamp_keep(int keep, Index available) {
  return keep <= 0 ? static_cast<int>(available) : static_cast<int>(std::min<Index>(keep, available));
}

Tensor hybrid_of(const Tensor* spatial, const Tensor& c3, const Tensor& c5) {
  if (spatial) {
    const Tensor* parts[] = {spatial, &c3, &c5};
    return concat_channels<double>(std::span<const Tensor* const>(parts));
  }
  return concat_channels(c3, c5);
}

}  // namespace

Index LayerState::hybrid_channels() const {
  Index n = saab3.output_channels() + saab5.output_channels();
  if (spatial) n += spatial->channels();
  return n;
}

bool FeaturePipeline::fitted() const {
  for (int l = 0; l < kLayerCount; ++l) {
    const auto& L = layers[l];
    if (!L.saab3.fitted() || !L.saab5.fitted()) return false;
    if (has_spatial(l) && !L.spatial) return false;
    if (has_forward(l) && (!L.forward3.fitted() || !L.forward5.fitted())) return false;
  }
  return true;
}

TrainingSample make_training_sample(const Tensor& image480, const Tensor& gt480) {
  if (gt480.channels() != 1) throw InvalidArgument("ground truth must be single-channel");
  TrainingSample s;
  s.d4_image = downsample_to_level(image480, Level::d4);
  s.gt[0] = downsample_to_level(gt480, Level::d4);
  for (int l = 1; l < kLayerCount; ++l) s.gt[l] = downsample2(s.gt[l - 1]);
  return s;
}

std::vector<Index> sample_pixels(Level level, double fraction, std::uint64_t seed, std::uint64_t purpose,
                                 std::uint64_t image_index) {
  const Resolution r = level_resolution(level);
  const Index n = r.rows * r.cols;
  const Index k = fraction >= 1.0 ? n : std::max<Index>(1, std::llround(fraction * double(n)));
  const auto picked =
      sample_indices(n, k, derive_seed(seed, {purpose, static_cast<std::uint64_t>(level), image_index}));
  return {picked.begin(), picked.end()};
}

FeaturePipeline fit_feature_pipeline(std::span<const TrainingSample> samples, const PipelineConfig& cfg,
                                     const FitContext& ctx) {
  if (samples.size() < 2) throw FitError("fit_feature_pipeline: need at least 2 training images");
  const size_t n_img = samples.size();
  FeaturePipeline fp;
  fp.config = cfg;

  std::vector<Tensor> carry3(n_img), carry5(n_img), level_img(n_img);
  for (size_t i = 0; i < n_img; ++i) carry3[i] = carry5[i] = level_img[i] = samples[i].d4_image;

  for (int l = 0; l < kLayerCount; ++l) {
    const Level level = kLevels[l];
    LayerState& L = fp.layers[l];
    L.level = level;
    auto t0 = std::chrono::steady_clock::now();
    if (l > 0) parallel_for(n_img, ctx.jobs, [&](std::int64_t i) { level_img[i] = downsample2(level_img[i]); });

    const Index c3_in = carry3[0].channels(), c5_in = carry5[0].channels();
    SaabConfig s3{3, 1, clamp_keep(cfg.saab3_keep[l], 9 * c3_in), cfg.saab_patch_cap,
                  derive_seed(ctx.seed, {kSaab3, static_cast<std::uint64_t>(l)})};
    SaabConfig s5{5, 1, clamp_keep(cfg.saab5_keep[l], 25 * c5_in), cfg.saab_patch_cap,
                  derive_seed(ctx.seed, {kSaab5, static_cast<std::uint64_t>(l)})};
    L.saab3 = fit_saab(carry3, s3);
    L.saab5 = fit_saab(carry5, s5);
    if (has_spatial(l)) {
      L.spatial = fit_spatial(level, level_img, cfg.spatial, derive_seed(ctx.seed, {kSpatial, static_cast<std::uint64_t>(l)}));
    }
    std::ostringstream msg;
    msg << level_name(level) << ": saab3 " << c3_in << "->" << L.saab3.output_channels() << ", saab5 " << c5_in
        << "->" << L.saab5.output_channels();
    if (L.spatial) msg << ", spatial " << L.spatial->channels();
    msg << " (" << seconds_since(t0) << " s)";
    ctx.info(msg.str());
    if (l == kLayerCount - 1) break;

    // Coefficients of this layer, pooled to the next layer. Pooling commutes
    // with channel selection, so selection happens on the pooled tensors.
    std::vector<Tensor> pooled3(n_img), pooled5(n_img);
    std::vector<RowMatrix<double>> rows3(n_img), rows5(n_img);
    std::vector<Eigen::VectorXd> targets(n_img);
    parallel_for(n_img, ctx.jobs, [&](std::int64_t i) {
      const Tensor c3 = apply_saab(carry3[i], L.saab3);
      const Tensor c5 = apply_saab(carry5[i], L.saab5);
      if (has_forward(l)) {
        const auto px = sample_pixels(level, cfg.sample_fraction[l], ctx.seed, kForwardSample,
                                      static_cast<std::uint64_t>(i));
        rows3[i].resize(static_cast<Index>(px.size()), c3.channels());
        rows5[i].resize(static_cast<Index>(px.size()), c5.channels());
        targets[i].resize(static_cast<Index>(px.size()));
        for (size_t j = 0; j < px.size(); ++j) {
          rows3[i].row(static_cast<Index>(j)) = c3.matrix().row(px[j]);
          rows5[i].row(static_cast<Index>(j)) = c5.matrix().row(px[j]);
          targets[i](static_cast<Index>(j)) = samples[i].gt[l].matrix()(px[j], 0);
        }
      }
      pooled3[i] = downsample2(c3);
      pooled5[i] = downsample2(c5);
    });

    if (!has_forward(l)) {
      carry3 = std::move(pooled3);
      carry5 = std::move(pooled5);
      continue;
    }
    Index total = 0;
    for (const auto& t : targets) total += t.size();
    RowMatrix<double> all3(total, rows3[0].cols()), all5(total, rows5[0].cols());
    Eigen::VectorXd y(total);
    Index off = 0;
    for (size_t i = 0; i < n_img; ++i) {
      const Index k = targets[i].size();
      all3.middleRows(off, k) = rows3[i];
      all5.middleRows(off, k) = rows5[i];
      y.segment(off, k) = targets[i];
      off += k;
    }
    const int keep = cfg.forward_keep[static_cast<size_t>(l - 1)];
    L.forward3 = rft_select(all3, y, cfg.rft_bins, clamp_keep(keep, all3.cols()), ctx.jobs);
    L.forward5 = rft_select(all5, y, cfg.rft_bins, clamp_keep(keep, all5.cols()), ctx.jobs);
    parallel_for(n_img, ctx.jobs, [&](std::int64_t i) {
      carry3[i] = select_channels<double>(pooled3[i], L.forward3.selected);
      carry5[i] = select_channels<double>(pooled5[i], L.forward5.selected);
    });
  }
  return fp;
}

std::array<Tensor, kLayerCount> extract_hybrids(const Tensor& d4_image, const FeaturePipeline& pipeline) {
  if (!pipeline.fitted()) throw InvalidState("feature pipeline is not fitted");
  const Resolution r4 = level_resolution(Level::d4);
  if (d4_image.height() != r4.rows || d4_image.width() != r4.cols || d4_image.channels() != 3)
    throw InvalidArgument("extract_hybrids: expected a 120x160x3 image");
  std::array<Tensor, kLayerCount> hybrids;
  Tensor carry3 = d4_image, carry5 = d4_image, level_img = d4_image;
  for (int l = 0; l < kLayerCount; ++l) {
    const LayerState& L = pipeline.layers[l];
    if (l > 0) level_img = downsample2(level_img);
    const Tensor c3 = apply_saab(carry3, L.saab3);
    const Tensor c5 = apply_saab(carry5, L.saab5);
    std::optional<Tensor> spatial;
    if (L.spatial) spatial = spatial_feature_stack(L.level, level_img, *L.spatial);
    hybrids[l] = hybrid_of(spatial ? &*spatial : nullptr, c3, c5);
    if (l == kLayerCount - 1) break;
    if (has_forward(l)) {
      carry3 = downsample2(select_channels<double>(c3, L.forward3.selected));
      carry5 = downsample2(select_channels<double>(c5, L.forward5.selected));
    } else {
      carry3 = downsample2(c3);
      carry5 = downsample2(c5);
    }
  }
  return hybrids;
}

FeatureSets extract_feature_sets_d4(const Tensor& d4_image, const FeaturePipeline& pipeline) {
  const auto hybrids = extract_hybrids(d4_image, pipeline);
  FeatureSets out;
  for (int s = 0; s < kSetCount; ++s) out.sets[s] = concat_channels(downsample2(hybrids[s]), hybrids[s + 1]);
  return out;
}

FeatureSets extract_feature_sets(const Tensor& image480, const FeaturePipeline& pipeline) {
  if (!pipeline.fitted()) throw InvalidState("feature pipeline is not fitted");
  return extract_feature_sets_d4(downsample_to_level(image480, Level::d4), pipeline);
}

std::string describe_shapes(const FeaturePipeline& fp) {
  std::ostringstream os;
  os << "stage,resolution,input_channels,output_channels\n";
  for (int l = 0; l < kLayerCount; ++l) {
    const auto& L = fp.layers[l];
    const Resolution r = level_resolution(L.level);
    const std::string res = std::to_string(r.rows) + "x" + std::to_string(r.cols);
    const std::string name = level_name(L.level);
    os << name << ".saab3," << res << "," << L.saab3.input_channels << "," << L.saab3.output_channels() << "\n";
    os << name << ".saab5," << res << "," << L.saab5.input_channels << "," << L.saab5.output_channels() << "\n";
    if (L.spatial) {
      os << name << ".spatial.local2," << res << "," << L.spatial->stage1.input_channels << ","
         << L.spatial->stage1.output_channels() << "\n";
      os << name << ".spatial.local3," << res << "," << L.spatial->stage2.input_channels << ","
         << L.spatial->stage2.output_channels() << "\n";
      os << name << ".spatial," << res << "," << 3 << "," << L.spatial->channels() << "\n";
    }
    if (L.forward3.fitted()) {
      os << name << ".forward3," << res << "," << L.saab3.output_channels() << "," << L.forward3.selected.size()
         << "\n";
      os << name << ".forward5," << res << "," << L.saab5.output_channels() << "," << L.forward5.selected.size()
         << "\n";
    }
    os << name << ".hybrid," << res << ",," << L.hybrid_channels() << "\n";
  }
  for (int s = 0; s < kSetCount; ++s) {
    const Resolution r = level_resolution(set_level(s));
    os << "set." << level_name(set_level(s)) << "," << r.rows << "x" << r.cols << ","
       << fp.hybrid_channels(s) << "+" << fp.hybrid_channels(s + 1) << "," << fp.set_channels(s) << "\n";
  }
  return os.str();
}

}  // namespace fovea
