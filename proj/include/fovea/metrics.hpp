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

// Saliency evaluation metrics: CC, SIM, NSS, AUC-Judd and shuffled AUC.
//
// Maps are single-channel tensors of equal resolution; nothing is resized
// here. Fixations are integer pixel positions.

#ifndef FOVEA_METRICS_HPP_
#define FOVEA_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fovea/errors.hpp"
#include "fovea/imaging.hpp"
#include "fovea/random.hpp"
#include "fovea/tensor.hpp"

namespace fovea {

struct FixationPoint {
  Index x = 0;
  Index y = 0;
  friend bool operator==(const FixationPoint&, const FixationPoint&) = default;
};

struct FixationMap {
  Index height = 0;
  Index width = 0;
  std::vector<FixationPoint> points;

  void validate() const {
    if (height < 1 || width < 1) throw InvalidArgument("fixation map has an empty resolution");
    for (const auto& p : points)
      if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height)
        throw InvalidArgument("fixation (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                              ") outside " + std::to_string(width) + "x" + std::to_string(height));
  }

  /// Row-major pixel indices of the fixated pixels, sorted and deduplicated.
  std::vector<Index> pixel_indices() const {
    std::vector<Index> idx;
    idx.reserve(points.size());
    for (const auto& p : points) idx.push_back(p.y * width + p.x);
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
  }

  /// Binary H x W mask.
  Tensor mask() const {
    Tensor m(height, width, 1);
    for (Index i : pixel_indices()) m.matrix()(i, 0) = 1.0;
    return m;
  }

  /// Same fixations at another resolution; a point maps to the target pixel
  /// containing its source pixel's centre.
  FixationMap rescaled(Resolution target) const {
    FixationMap out{target.rows, target.cols, {}};
    out.points.reserve(points.size());
    for (const auto& p : points) {
      const Index x = std::min(target.cols - 1, static_cast<Index>(std::floor((p.x + 0.5) * target.cols / width)));
      const Index y = std::min(target.rows - 1, static_cast<Index>(std::floor((p.y + 0.5) * target.rows / height)));
      out.points.push_back({x, y});
    }
    return out;
  }
};

namespace detail {

template <typename Scalar>
void require_map(const PlaneTensor<Scalar>& m, const char* what) {
  if (m.empty() || m.channels() != 1) throw InvalidArgument(std::string(what) + ": expected a single-channel map");
}

template <typename Scalar>
void require_same_resolution(const PlaneTensor<Scalar>& a, const PlaneTensor<Scalar>& b, const char* what) {
  require_map(a, what);
  require_map(b, what);
  if (a.height() != b.height() || a.width() != b.width())
    throw InvalidArgument(std::string(what) + ": resolution mismatch " + std::to_string(a.height()) + "x" +
                          std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                          std::to_string(b.width()));
}

template <typename Scalar>
std::vector<Index> fixated_pixels(const PlaneTensor<Scalar>& pred, const FixationMap& fix, const char* what) {
  require_map(pred, what);
  if (fix.height != pred.height() || fix.width != pred.width())
    throw InvalidArgument(std::string(what) + ": fixation map resolution does not match the prediction");
  fix.validate();
  auto idx = fix.pixel_indices();
  if (idx.empty()) throw UndefinedMetric(std::string(what) + ": no fixations");
  return idx;
}

/// Mean and population standard deviation.
template <typename Scalar>
std::pair<double, double> moments(const PlaneTensor<Scalar>& m) {
  const auto v = m.matrix().col(0).template cast<double>();
  const double mean = v.mean();
  const double var = (v.array() - mean).square().mean();
  return {mean, std::sqrt(var)};
}

/// P(pos > neg) + 0.5 P(pos == neg).
inline double mann_whitney(std::vector<double> pos, std::vector<double> neg) {
  std::sort(neg.begin(), neg.end());
  double wins = 0.0;
  for (double p : pos) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    wins += double(lo - neg.begin()) + 0.5 * double(hi - lo);
  }
  return wins / (double(pos.size()) * double(neg.size()));
}

}  // namespace detail

/// Pearson correlation over all pixels.
template <typename Scalar>
double cc(const PlaneTensor<Scalar>& pred, const PlaneTensor<Scalar>& gt) {
  detail::require_same_resolution(pred, gt, "cc");
  const auto a = pred.matrix().col(0).template cast<double>().eval();
  const auto b = gt.matrix().col(0).template cast<double>().eval();
  const Eigen::ArrayXd da = a.array() - a.mean(), db = b.array() - b.mean();
  const double saa = da.square().sum(), sbb = db.square().sum();
  if (!(saa > 0.0) || !(sbb > 0.0)) throw UndefinedMetric("cc: constant map");
  return std::clamp((da * db).sum() / std::sqrt(saa * sbb), -1.0, 1.0);
}

/// Histogram intersection of the sum-normalized maps.
template <typename Scalar>
double sim(const PlaneTensor<Scalar>& pred, const PlaneTensor<Scalar>& gt) {
  detail::require_same_resolution(pred, gt, "sim");
  const auto a = pred.matrix().col(0).template cast<double>().eval();
  const auto b = gt.matrix().col(0).template cast<double>().eval();
  if (a.minCoeff() < 0.0 || b.minCoeff() < 0.0) throw UndefinedMetric("sim: negative map values");
  const double sa = a.sum(), sb = b.sum();
  if (!(sa > 0.0) || !(sb > 0.0)) throw UndefinedMetric("sim: zero-sum map");
  return (a.array() / sa).min(b.array() / sb).sum();
}

/// Mean z-scored prediction at the fixated pixels (each pixel counted once).
template <typename Scalar>
double nss(const PlaneTensor<Scalar>& pred, const FixationMap& fix) {
  const auto idx = detail::fixated_pixels(pred, fix, "nss");
  const auto [mean, sd] = detail::moments(pred);
  if (!(sd > 0.0)) throw UndefinedMetric("nss: constant map");
  double acc = 0.0;
  for (Index i : idx) acc += (double(pred.matrix()(i, 0)) - mean) / sd;
  return acc / double(idx.size());
}

/// ROC area with thresholds at the fixated values; ties count as above the
/// threshold on both axes.
template <typename Scalar>
double auc_judd(const PlaneTensor<Scalar>& pred, const FixationMap& fix) {
  const auto idx = detail::fixated_pixels(pred, fix, "auc_judd");
  const Index n = pred.pixels();
  const Index n_pos = static_cast<Index>(idx.size());
  if (n_pos == n) throw UndefinedMetric("auc_judd: every pixel is fixated");
  std::vector<double> all(static_cast<size_t>(n)), pos;
  for (Index i = 0; i < n; ++i) all[i] = double(pred.matrix()(i, 0));
  pos.reserve(idx.size());
  for (Index i : idx) pos.push_back(all[i]);
  std::sort(all.begin(), all.end());
  std::sort(pos.begin(), pos.end());
  std::vector<double> thresholds = pos;
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  double area = 0.0, prev_tp = 0.0, prev_fp = 0.0;
  for (auto t = thresholds.rbegin(); t != thresholds.rend(); ++t) {
    const Index tp = pos.end() - std::lower_bound(pos.begin(), pos.end(), *t);
    const Index above = all.end() - std::lower_bound(all.begin(), all.end(), *t);
    const double tpr = double(tp) / double(n_pos);
    const double fpr = double(above - tp) / double(n - n_pos);
    area += 0.5 * (tpr + prev_tp) * (fpr - prev_fp);
    prev_tp = tpr;
    prev_fp = fpr;
  }
  area += 0.5 * (1.0 + prev_tp) * (1.0 - prev_fp);
  return area;
}

inline constexpr int kShuffledNegativeRatio = 10;
inline constexpr std::uint64_t kShuffledDefaultSeed = 0x5A17E5EEDull;

/// ROC area of fixated values against values at other images' fixations.
/// Every map in `others` is rescaled to the prediction's resolution; at most
/// ratio x positives negatives are drawn without replacement.
template <typename Scalar>
double shuffled_auc(const PlaneTensor<Scalar>& pred, const FixationMap& fix, std::span<const FixationMap> others,
                    std::uint64_t seed = kShuffledDefaultSeed, int ratio = kShuffledNegativeRatio) {
  if (others.empty()) throw InvalidArgument("shuffled_auc: no other fixation maps");
  if (ratio < 1) throw InvalidArgument("shuffled_auc: negative ratio must be >= 1");
  const auto idx = detail::fixated_pixels(pred, fix, "shuffled_auc");
  const Resolution r{pred.height(), pred.width()};
  std::vector<Index> pool;
  for (const auto& o : others) {
    o.validate();
    const auto px = o.rescaled(r).pixel_indices();
    pool.insert(pool.end(), px.begin(), px.end());
  }
  if (pool.empty()) throw UndefinedMetric("shuffled_auc: other fixation maps are empty");

  std::vector<double> pos, neg;
  pos.reserve(idx.size());
  for (Index i : idx) pos.push_back(double(pred.matrix()(i, 0)));
  const auto cap = static_cast<std::int64_t>(ratio) * static_cast<std::int64_t>(idx.size());
  const auto chosen = sample_indices(static_cast<std::int64_t>(pool.size()), cap, seed);
  neg.reserve(chosen.size());
  for (auto j : chosen) neg.push_back(double(pred.matrix()(pool[static_cast<size_t>(j)], 0)));
  return detail::mann_whitney(std::move(pos), std::move(neg));
}

struct MetricRow {
  std::string image;
  double auc_j = 0.0;
  double s_auc = 0.0;
  double cc = 0.0;
  double sim = 0.0;
  double nss = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> rows;

  MetricRow means() const {
    MetricRow m{"mean"};
    if (rows.empty()) return m;
    for (const auto& r : rows) {
      m.auc_j += r.auc_j;
      m.s_auc += r.s_auc;
      m.cc += r.cc;
      m.sim += r.sim;
      m.nss += r.nss;
    }
    const double n = double(rows.size());
    m.auc_j /= n;
    m.s_auc /= n;
    m.cc /= n;
    m.sim /= n;
    m.nss /= n;
    return m;
  }
};

}  // namespace fovea

#endif  // FOVEA_METRICS_HPP_
