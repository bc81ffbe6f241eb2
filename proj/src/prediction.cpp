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

#include "fovea/prediction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "fovea/parallel.hpp"
#include "fovea/random.hpp"

namespace fovea {
namespace {

enum SeedTag : std::uint64_t {
  kHeadSample = 21,
  kMapGbt = 22,
  kResidualGbt = 23,
  kEnsembleSample = 24,
  kEnsembleGbt = 25,
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Tensor as_map(Index h, Index w, const Eigen::VectorXd& v) {
  RowMatrix<double> m = v;
  return Tensor(h, w, std::move(m));
}

/// Rows of every image stacked in image order.
struct Stacked {
  RowMatrix<double> x;
  Eigen::VectorXd y;
};

Stacked stack(const std::vector<RowMatrix<double>>& rows, const std::vector<Eigen::VectorXd>& targets) {
  Index total = 0;
  for (const auto& t : targets) total += t.size();
  Stacked s;
  s.x.resize(total, rows.front().cols());
  s.y.resize(total);
  Index off = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    const Index k = targets[i].size();
    s.x.middleRows(off, k) = rows[i];
    s.y.segment(off, k) = targets[i];
    off += k;
  }
  return s;
}

RegressionHead fit_head(const Stacked& data, int keep, int bins, GbtConfig gbt, std::uint64_t seed, int jobs) {
  RegressionHead h;
  const Index width = data.x.cols();
  keep = keep <= 0 ? static_cast<int>(width) : static_cast<int>(std::min<Index>(keep, width));
  h.rft = rft_select(data.x, data.y, bins, keep, jobs);
  gbt.seed = seed;
  h.model = gbt_fit(gather_columns(data.x, h.rft.selected), data.y, gbt, jobs);
  return h;
}

void gather_rows(const Tensor& t, const std::vector<Index>& px, RowMatrix<double>& out) {
  out.resize(static_cast<Index>(px.size()), t.channels());
  for (size_t j = 0; j < px.size(); ++j) out.row(static_cast<Index>(j)) = t.matrix().row(px[j]);
}

Eigen::VectorXd gather_values(const Tensor& t, const std::vector<Index>& px) {
  Eigen::VectorXd v(static_cast<Index>(px.size()));
  for (size_t j = 0; j < px.size(); ++j) v(static_cast<Index>(j)) = t.matrix()(px[j], 0);
  return v;
}

std::string head_summary(const char* name, const RegressionHead& h, Index rows) {
  std::ostringstream os;
  os << name << ": " << rows << " rows, " << h.rft.selected.size() << "/" << h.rft.loss.size() << " features, "
     << h.model.trees.size() << " trees, train mse "
     << (h.model.training_mse.empty() ? 0.0 : h.model.training_mse.back());
  return os.str();
}

}  // namespace

void PostProcessConfig::validate() const {
  if (!(floor_quantile >= 0.0 && floor_quantile < 1.0))
    throw InvalidArgument("post-process floor_quantile must be in [0, 1)");
  if (blur_side < 1) throw InvalidArgument("post-process blur_side must be >= 1");
  if (!(blur_sigma > 0.0)) throw InvalidArgument("post-process blur_sigma must be positive");
}

Tensor RegressionHead::predict(const Tensor& set) const {
  if (!fitted()) throw InvalidState("regression head is not fitted");
  if (set.channels() != static_cast<Index>(rft.loss.size()))
    throw InvalidArgument("regression head: feature width " + std::to_string(set.channels()) + ", expected " +
                          std::to_string(rft.loss.size()));
  return as_map(set.height(), set.width(), gbt_predict(model, set.matrix(), rft.selected));
}

bool PathHeads::fitted() const {
  for (const auto& h : map)
    if (!h.fitted()) return false;
  return residual16.fitted() && residual8.fitted();
}

PathHeads fit_paths(size_t image_count, const FeatureSource& features, std::span<const TrainingSample> samples,
                    const PipelineConfig& pipeline_cfg, const PredictionConfig& cfg, const FitContext& ctx) {
  if (image_count == 0) throw FitError("fit_paths: no training images");
  if (samples.size() != image_count) throw FitError("fit_paths: ground truth missing for some training images");
  for (const auto& s : samples)
    for (const auto& g : s.gt)
      if (g.empty()) throw FitError("fit_paths: ground truth missing for some training images");

  const auto t0 = std::chrono::steady_clock::now();
  // Sampled rows per set and image, plus the full d32 and d64 sets, which the
  // residual targets need at every pixel.
  std::array<std::vector<RowMatrix<double>>, kSetCount> rows;
  std::array<std::vector<Eigen::VectorXd>, kSetCount> targets;
  std::array<std::vector<std::vector<Index>>, kSetCount> pixels;
  for (int s = 0; s < kSetCount; ++s) {
    rows[s].resize(image_count);
    targets[s].resize(image_count);
    pixels[s].resize(image_count);
  }
  std::vector<Tensor> full32(image_count), full64(image_count);

  parallel_for(static_cast<std::int64_t>(image_count), ctx.jobs, [&](std::int64_t i) {
    FeatureSets fs = features(static_cast<size_t>(i));
    for (int s = 0; s < kSetCount; ++s) {
      const Level level = set_level(s);
      const Tensor& gt = samples[i].gt[level_index(level)];
      if (gt.height() != fs.sets[s].height() || gt.width() != fs.sets[s].width())
        throw FitError("fit_paths: ground truth resolution does not match feature set");
      pixels[s][i] = sample_pixels(level, pipeline_cfg.sample_fraction[static_cast<size_t>(s + 1)], ctx.seed,
                                   kHeadSample, static_cast<std::uint64_t>(i));
      gather_rows(fs.sets[s], pixels[s][i], rows[s][i]);
      targets[s][i] = gather_values(gt, pixels[s][i]);
    }
    full32[i] = std::move(fs.sets[2]);
    full64[i] = std::move(fs.sets[3]);
  });
  ctx.info("heads: gathered training rows (" + std::to_string(seconds_since(t0)) + " s)");

  PathHeads heads;
  static const char* kMapNames[kSetCount] = {"map.d8", "map.d16", "map.d32", "map.d64"};
  // Coarse heads first; their predictions define the residual targets.
  for (int s = kSetCount - 1; s >= 0; --s) {
    const auto t1 = std::chrono::steady_clock::now();
    const Stacked data = stack(rows[s], targets[s]);
    heads.map[s] = fit_head(data, cfg.head_keep[s], pipeline_cfg.rft_bins, cfg.gbt,
                            derive_seed(ctx.seed, {kMapGbt, static_cast<std::uint64_t>(s)}), ctx.jobs);
    ctx.info(head_summary(kMapNames[s], heads.map[s], data.x.rows()) + " (" + std::to_string(seconds_since(t1)) +
             " s)");
  }

  // Residual targets: GT minus the upsampled in-sample coarse prediction.
  struct Pairing {
    int fine, coarse;
    const std::vector<Tensor>* coarse_sets;
    RegressionHead PathHeads::*head;
    const char* name;
  };
  const Pairing pairings[] = {{1, 3, &full64, &PathHeads::residual16, "residual.d16"},
                              {0, 2, &full32, &PathHeads::residual8, "residual.d8"}};
  for (const auto& p : pairings) {
    const auto t1 = std::chrono::steady_clock::now();
    const Resolution fine_res = level_resolution(set_level(p.fine));
    std::vector<Eigen::VectorXd> residual(image_count);
    parallel_for(static_cast<std::int64_t>(image_count), ctx.jobs, [&](std::int64_t i) {
      const Tensor coarse = upsample_to(heads.map[p.coarse].predict((*p.coarse_sets)[i]), fine_res);
      residual[i] = targets[p.fine][i] - gather_values(coarse, pixels[p.fine][i]);
    });
    const Stacked data = stack(rows[p.fine], residual);
    heads.*p.head = fit_head(data, cfg.head_keep[p.fine], pipeline_cfg.rft_bins, cfg.gbt,
                             derive_seed(ctx.seed, {kResidualGbt, static_cast<std::uint64_t>(p.fine)}), ctx.jobs);
    std::ostringstream os;
    os << head_summary(p.name, heads.*p.head, data.x.rows()) << ", target mean " << data.y.mean() << " ("
       << seconds_since(t1) << " s)";
    ctx.info(os.str());
  }
  return heads;
}

PathMaps predict_paths(const FeatureSets& sets, const PathHeads& heads) {
  if (!heads.fitted()) throw InvalidState("path heads are not fitted");
  PathMaps m;
  m.s8 = heads.map[0].predict(sets.sets[0]);
  m.s16 = heads.map[1].predict(sets.sets[1]);
  m.s32 = heads.map[2].predict(sets.sets[2]);
  m.s64 = heads.map[3].predict(sets.sets[3]);
  m.p8 = m.s8;
  m.p16 = m.s16;
  m.p64c = upsample_to(m.s64, level_resolution(set_level(1)));
  m.p64c.matrix() += heads.residual16.predict(sets.sets[1]).matrix();
  m.p32c = upsample_to(m.s32, level_resolution(set_level(0)));
  m.p32c.matrix() += heads.residual8.predict(sets.sets[0]).matrix();
  return m;
}

namespace {

std::array<Tensor, kEnsembleMaps> ensemble_planes(const std::array<const Tensor*, kEnsembleMaps>& maps) {
  const Resolution r = level_resolution(Level::d4);
  std::array<Tensor, kEnsembleMaps> up;
  for (int k = 0; k < kEnsembleMaps; ++k) {
    if (!maps[k] || maps[k]->channels() != 1) throw InvalidArgument("ensemble: expected four single-channel maps");
    up[k] = (maps[k]->height() == r.rows && maps[k]->width() == r.cols) ? *maps[k] : upsample_to(*maps[k], r);
  }
  return up;
}

// Neighbourhood vectors of image row `y`, one output row per pixel.
void fill_ensemble_row(const std::array<Tensor, kEnsembleMaps>& up, Index y, RowMatrix<double>& out, Index first) {
  constexpr int half = kEnsembleWindow / 2;
  const Index rows = up[0].height(), cols = up[0].width();
  for (Index x = 0; x < cols; ++x) {
    double* dst = out.row(first + x).data();
    for (int k = 0; k < kEnsembleMaps; ++k) {
      for (int dy = -half; dy <= half; ++dy) {
        const Index yy = std::clamp<Index>(y + dy, 0, rows - 1);
        for (int dx = -half; dx <= half; ++dx) {
          const Index xx = std::clamp<Index>(x + dx, 0, cols - 1);
          *dst++ = up[k](yy, xx);
        }
      }
    }
  }
}

}  // namespace

RowMatrix<double> ensemble_vectors(const std::array<const Tensor*, kEnsembleMaps>& maps) {
  const auto up = ensemble_planes(maps);
  const Resolution r = level_resolution(Level::d4);
  RowMatrix<double> out(r.rows * r.cols, kEnsembleDims);
  for (Index y = 0; y < r.rows; ++y) fill_ensemble_row(up, y, out, y * r.cols);
  return out;
}

EnsembleHead fit_ensemble(size_t image_count, const std::function<PathMaps(size_t)>& paths,
                          std::span<const TrainingSample> samples, const PipelineConfig& pipeline_cfg,
                          const PredictionConfig& cfg, const FitContext& ctx) {
  if (image_count == 0) throw FitError("fit_ensemble: no training images");
  if (samples.size() != image_count) throw FitError("fit_ensemble: ground truth missing for some training images");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<RowMatrix<double>> rows(image_count);
  std::vector<Eigen::VectorXd> targets(image_count);
  parallel_for(static_cast<std::int64_t>(image_count), ctx.jobs, [&](std::int64_t i) {
    const PathMaps m = paths(static_cast<size_t>(i));
    const RowMatrix<double> v = ensemble_vectors(m.fused_inputs());
    const auto px = sample_pixels(Level::d4, pipeline_cfg.sample_fraction[0], ctx.seed, kEnsembleSample,
                                  static_cast<std::uint64_t>(i));
    rows[i].resize(static_cast<Index>(px.size()), kEnsembleDims);
    for (size_t j = 0; j < px.size(); ++j) rows[i].row(static_cast<Index>(j)) = v.row(px[j]);
    const Tensor& gt = samples[i].gt[0];
    if (gt.empty()) throw FitError("fit_ensemble: ground truth missing for some training images");
    targets[i] = gather_values(gt, px);
  });
  const Stacked data = stack(rows, targets);
  GbtConfig g = cfg.gbt;
  g.seed = derive_seed(ctx.seed, {kEnsembleGbt});
  EnsembleHead head;
  head.model = gbt_fit(data.x, data.y, g, ctx.jobs);
  std::ostringstream os;
  os << "ensemble: " << data.x.rows() << " rows, " << head.model.trees.size() << " trees, train mse "
     << (head.model.training_mse.empty() ? 0.0 : head.model.training_mse.back()) << " (" << seconds_since(t0)
     << " s)";
  ctx.info(os.str());
  return head;
}

Tensor ensemble_fuse(const PathMaps& maps, const EnsembleHead& head) {
  if (!head.fitted()) throw InvalidState("ensemble head is not fitted");
  if (head.model.feature_count != kEnsembleDims) throw InvalidArgument("ensemble head has the wrong input width");
  const auto up = ensemble_planes(maps.fused_inputs());
  const Resolution r = level_resolution(Level::d4);
  Tensor out(r.rows, r.cols, 1);
  RowMatrix<double> rows(r.cols, kEnsembleDims);
  for (Index y = 0; y < r.rows; ++y) {
    fill_ensemble_row(up, y, rows, 0);
    out.matrix().middleRows(y * r.cols, r.cols).col(0) = gbt_predict(head.model, rows);
  }
  return out;
}

Tensor post_process(const Tensor& map, const PostProcessConfig& cfg) {
  cfg.validate();
  if (map.channels() != 1) throw InvalidArgument("post_process: expected a single-channel map");
  Tensor t = upsample_to(map, Resolution{kInputHeight, kInputWidth});
  auto& v = t.matrix();
  if (cfg.floor_quantile > 0.0) {
    std::vector<double> sorted(v.data(), v.data() + v.size());
    const auto n = static_cast<Index>(sorted.size());
    const Index k = std::clamp<Index>(static_cast<Index>(std::ceil(cfg.floor_quantile * double(n))) - 1, 0, n - 1);
    std::nth_element(sorted.begin(), sorted.begin() + k, sorted.end());
    v = v.cwiseMax(sorted[static_cast<size_t>(k)]);
  }
  t = gaussian_blur(t, cfg.blur_side, cfg.blur_sigma);
  const double lo = t.matrix().minCoeff(), hi = t.matrix().maxCoeff();
  // Blurring a flat map leaves rounding-level ripple; treat it as flat.
  const double flat = 64 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
  if (!(hi - lo > flat)) {
    t.matrix().setZero();
  } else {
    t.matrix() = (t.matrix().array() - lo) / (hi - lo);
  }
  return t;
}

}  // namespace fovea
