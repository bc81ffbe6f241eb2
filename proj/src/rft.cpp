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

#include "fovea/rft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fovea/parallel.hpp"

namespace fovea {
namespace {

void validate(Index n, Index p, Index target_len, int bins) {
  if (n == 0 || p == 0) throw InvalidArgument("rft: empty feature matrix");
  if (target_len != n) throw InvalidArgument("rft: target length does not match feature rows");
  if (bins < 2) throw InvalidArgument("rft: bins must be >= 2");
  if (n < 2 * Index(bins)) throw InvalidArgument("rft: need at least 2 * bins samples");
}

// Sum of squared deviations from the mean, from first and second moments.
double sse(double s1, double s2, Index n) {
  if (n == 0) return 0.0;
  return std::max(0.0, s2 - s1 * s1 / double(n));
}

struct Accumulated {
  double f_min = 0, f_max = 0;
  std::vector<double> thresholds;
  std::vector<Index> count;
  std::vector<double> s1, s2;
};

// Per-segment moments of the centred target. Segment b holds samples with
// exactly b thresholds <= x, so "left of threshold t" is segments < t.
Accumulated accumulate(const Eigen::Ref<const Eigen::VectorXd>& f, const Eigen::VectorXd& yc, int bins) {
  Accumulated a;
  a.f_min = f.minCoeff();
  a.f_max = f.maxCoeff();
  if (!(a.f_max > a.f_min)) return a;
  const double width = a.f_max - a.f_min;
  a.thresholds.resize(static_cast<size_t>(bins - 1));
  for (int t = 1; t < bins; ++t) a.thresholds[t - 1] = a.f_min + double(t) * width / double(bins);
  a.count.assign(static_cast<size_t>(bins), 0);
  a.s1.assign(static_cast<size_t>(bins), 0.0);
  a.s2.assign(static_cast<size_t>(bins), 0.0);
  for (Index i = 0; i < f.size(); ++i) {
    const auto b = std::upper_bound(a.thresholds.begin(), a.thresholds.end(), f(i)) - a.thresholds.begin();
    a.count[b] += 1;
    a.s1[b] += yc(i);
    a.s2[b] += yc(i) * yc(i);
  }
  return a;
}

double optimized_loss(const Accumulated& a, Index n, double target_var) {
  if (a.thresholds.empty()) return target_var;
  const int bins = static_cast<int>(a.count.size());
  Index total_n = 0;
  double total_s1 = 0, total_s2 = 0;
  for (int b = 0; b < bins; ++b) {
    total_n += a.count[b];
    total_s1 += a.s1[b];
    total_s2 += a.s2[b];
  }
  double best = std::numeric_limits<double>::infinity();
  Index ln = 0;
  double l1 = 0, l2 = 0;
  for (int t = 1; t < bins; ++t) {
    ln += a.count[t - 1];
    l1 += a.s1[t - 1];
    l2 += a.s2[t - 1];
    const Index rn = total_n - ln;
    if (ln == 0 || rn == 0) continue;
    const double loss = (sse(l1, l2, ln) + sse(total_s1 - l1, total_s2 - l2, rn)) / double(n);
    best = std::min(best, loss);
  }
  return std::isfinite(best) ? best : target_var;
}

Eigen::VectorXd centred(const Eigen::Ref<const Eigen::VectorXd>& y) {
  return (y.array() - y.mean()).matrix();
}

}  // namespace

RftBinStats rft_bin_stats(const Eigen::Ref<const Eigen::VectorXd>& feature,
                          const Eigen::Ref<const Eigen::VectorXd>& target, int bins) {
  validate(feature.size(), 1, target.size(), bins);
  const Eigen::VectorXd yc = centred(target);
  const Accumulated a = accumulate(feature, yc, bins);
  RftBinStats st;
  if (a.thresholds.empty()) return st;
  st.thresholds = a.thresholds;
  const Index n = feature.size();
  Index ln = 0;
  double l1 = 0, l2 = 0;
  const double t1 = yc.sum(), t2 = yc.squaredNorm();
  for (int t = 1; t < bins; ++t) {
    ln += a.count[t - 1];
    l1 += a.s1[t - 1];
    l2 += a.s2[t - 1];
    const Index rn = n - ln;
    const double lm = ln ? sse(l1, l2, ln) / double(ln) : 0.0;
    const double rm = rn ? sse(t1 - l1, t2 - l2, rn) / double(rn) : 0.0;
    st.left_count.push_back(ln);
    st.right_count.push_back(rn);
    st.left_mse.push_back(lm);
    st.right_mse.push_back(rm);
    st.loss.push_back(ln && rn ? (double(ln) * lm + double(rn) * rm) / double(n)
                               : std::numeric_limits<double>::quiet_NaN());
  }
  return st;
}

RftResult rft_rank(const Eigen::Ref<const FeatureMatrix>& features, const Eigen::Ref<const Eigen::VectorXd>& target,
                   int bins, int jobs) {
  const Index n = features.rows(), p = features.cols();
  validate(n, p, target.size(), bins);
  if (!features.allFinite() || !target.allFinite()) throw InvalidArgument("rft: non-finite input");
  const Eigen::VectorXd yc = centred(target);
  const double var = yc.squaredNorm() / double(n);

  RftResult r;
  r.bins = bins;
  r.loss.resize(static_cast<size_t>(p));
  r.f_min.resize(static_cast<size_t>(p));
  r.f_max.resize(static_cast<size_t>(p));
  parallel_for(p, jobs, [&](std::int64_t j) {
    const Eigen::VectorXd col = features.col(j);
    const Accumulated a = accumulate(col, yc, bins);
    r.f_min[j] = a.f_min;
    r.f_max[j] = a.f_max;
    r.loss[j] = optimized_loss(a, n, var);
  });
  r.ranking.resize(static_cast<size_t>(p));
  std::iota(r.ranking.begin(), r.ranking.end(), 0);
  std::stable_sort(r.ranking.begin(), r.ranking.end(), [&](int a, int b) { return r.loss[a] < r.loss[b]; });
  r.selected = r.ranking;
  return r;
}

RftResult rft_select(const Eigen::Ref<const FeatureMatrix>& features, const Eigen::Ref<const Eigen::VectorXd>& target,
                     int bins, int keep, int jobs) {
  if (keep < 1 || keep > features.cols())
    throw InvalidArgument("rft_select: keep must be in [1, feature count]");
  RftResult r = rft_rank(features, target, bins, jobs);
  r.selected.resize(static_cast<size_t>(keep));
  return r;
}

FeatureMatrix gather_columns(const Eigen::Ref<const FeatureMatrix>& features, const std::vector<int>& selected) {
  FeatureMatrix out(features.rows(), static_cast<Index>(selected.size()));
  for (size_t i = 0; i < selected.size(); ++i) {
    if (selected[i] < 0 || selected[i] >= features.cols()) throw InvalidArgument("gather_columns: bad index");
    out.col(static_cast<Index>(i)) = features.col(selected[i]);
  }
  return out;
}

}  // namespace fovea
