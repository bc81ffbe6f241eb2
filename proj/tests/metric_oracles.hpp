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

// Direct-definition metric references: plain loops over pixels, no sorting
// or shared helpers from the library.

#ifndef FOVEA_TESTS_METRIC_ORACLES_HPP_
#define FOVEA_TESTS_METRIC_ORACLES_HPP_

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "fovea/metrics.hpp"
#include "fovea/random.hpp"
#include "fovea/spatial.hpp"

namespace fovea::testing {

inline double oracle_cc(const Tensor& a, const Tensor& b) {
  const Index n = a.pixels();
  double ma = 0, mb = 0;
  for (Index i = 0; i < n; ++i) {
    ma += a.matrix()(i, 0);
    mb += b.matrix()(i, 0);
  }
  ma /= double(n);
  mb /= double(n);
  double sab = 0, saa = 0, sbb = 0;
  for (Index i = 0; i < n; ++i) {
    const double da = a.matrix()(i, 0) - ma, db = b.matrix()(i, 0) - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return sab / std::sqrt(saa * sbb);
}

inline double oracle_sim(const Tensor& a, const Tensor& b) {
  double sa = 0, sb = 0;
  for (Index i = 0; i < a.pixels(); ++i) {
    sa += a.matrix()(i, 0);
    sb += b.matrix()(i, 0);
  }
  double s = 0;
  for (Index i = 0; i < a.pixels(); ++i) s += std::min(a.matrix()(i, 0) / sa, b.matrix()(i, 0) / sb);
  return s;
}

inline std::set<std::pair<Index, Index>> fixated_set(const FixationMap& f) {
  std::set<std::pair<Index, Index>> s;
  for (const auto& p : f.points) s.insert({p.y, p.x});
  return s;
}

inline double oracle_nss(const Tensor& m, const FixationMap& f) {
  const Index n = m.pixels();
  double mean = 0;
  for (Index i = 0; i < n; ++i) mean += m.matrix()(i, 0);
  mean /= double(n);
  double var = 0;
  for (Index i = 0; i < n; ++i) var += (m.matrix()(i, 0) - mean) * (m.matrix()(i, 0) - mean);
  const double sd = std::sqrt(var / double(n));
  double s = 0;
  const auto fx = fixated_set(f);
  for (const auto& [y, x] : fx) s += (m(y, x) - mean) / sd;
  return s / double(fx.size());
}

/// ROC of the Judd sweep: one threshold per distinct fixated value, TP and
/// FP counted by scanning every pixel.
inline double oracle_auc_judd(const Tensor& m, const FixationMap& f) {
  const auto fx = fixated_set(f);
  std::set<double, std::greater<>> thresholds;
  for (const auto& [y, x] : fx) thresholds.insert(m(y, x));
  const double npos = double(fx.size()), nneg = double(m.pixels()) - npos;
  std::vector<std::pair<double, double>> curve = {{0.0, 0.0}};
  for (double t : thresholds) {
    double tp = 0, fp = 0;
    for (Index y = 0; y < m.height(); ++y)
      for (Index x = 0; x < m.width(); ++x) {
        if (m(y, x) < t) continue;
        (fx.count({y, x}) ? tp : fp) += 1;
      }
    curve.push_back({fp / nneg, tp / npos});
  }
  curve.push_back({1.0, 1.0});
  double area = 0;
  for (size_t i = 1; i < curve.size(); ++i)
    area += (curve[i].first - curve[i - 1].first) * (curve[i].second + curve[i - 1].second) / 2;
  return area;
}

/// All positive/negative pairs, ties worth one half. Negatives are every
/// other image's distinct fixated pixel (mapped through pixel centres),
/// pooled with multiplicity across images.
inline double oracle_shuffled_auc_unsampled(const Tensor& m, const FixationMap& f,
                                            const std::vector<FixationMap>& others) {
  std::vector<double> neg;
  for (const auto& o : others) {
    std::set<std::pair<Index, Index>> px;
    for (const auto& p : o.points) {
      const Index x = std::min<Index>(m.width() - 1, Index(std::floor((p.x + 0.5) * m.width() / o.width)));
      const Index y = std::min<Index>(m.height() - 1, Index(std::floor((p.y + 0.5) * m.height() / o.height)));
      px.insert({y, x});
    }
    for (const auto& [y, x] : px) neg.push_back(m(y, x));
  }
  double wins = 0, pairs = 0;
  for (const auto& [y, x] : fixated_set(f))
    for (double v : neg) {
      wins += m(y, x) > v ? 1.0 : (m(y, x) == v ? 0.5 : 0.0);
      pairs += 1;
    }
  return wins / pairs;
}

inline FixationMap random_fixations(Index h, Index w, int count, Rng& rng) {
  FixationMap f{h, w, {}};
  for (int i = 0; i < count; ++i)
    f.points.push_back({Index(uniform_index(rng, std::uint64_t(w))), Index(uniform_index(rng, std::uint64_t(h)))});
  return f;
}

/// Fixations drawn from a centred Gaussian with sigma = width / 10 in every image.
inline std::vector<FixationMap> center_biased_fixations(int images, Index h, Index w, int per_image,
                                                        std::uint64_t seed) {
  Rng rng(seed);
  auto gauss = [](Rng& g) {  // Box-Muller
    const double u = 1.0 - uniform01(g), v = uniform01(g);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  };
  std::vector<FixationMap> out;
  for (int i = 0; i < images; ++i) {
    FixationMap f{h, w, {}};
    while (static_cast<int>(f.points.size()) < per_image) {
      const double x = (w - 1) / 2.0 + gauss(rng) * double(w) / 10.0;
      const double y = (h - 1) / 2.0 + gauss(rng) * double(w) / 10.0;
      const Index xi = std::llround(x), yi = std::llround(y);
      if (xi >= 0 && yi >= 0 && xi < w && yi < h) f.points.push_back({xi, yi});
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace fovea::testing

#endif  // FOVEA_TESTS_METRIC_ORACLES_HPP_
