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

#include "fovea/metrics.hpp"
#include "fovea/spatial.hpp"
#include "metric_oracles.hpp"
#include "test_util.hpp"

namespace fovea {
namespace {

using testing::random_tensor;

Tensor affine(const Tensor& m, double a, double b) {
  Tensor out = m;
  out.matrix() = (m.matrix().array() * a + b).matrix();
  return out;
}

TEST(Cc, Identities) {
  const Tensor m = random_tensor(8, 10, 1, 1);
  EXPECT_NEAR(cc(m, m), 1.0, 1e-15);
  EXPECT_NEAR(cc(m, affine(m, -1, 1)), -1.0, 1e-15);
  EXPECT_NEAR(cc(m, affine(m, 2.5, -7)), 1.0, 1e-14);
  EXPECT_THROW(cc(m, Tensor(8, 10, 1, 0.5)), UndefinedMetric);
  EXPECT_THROW(cc(m, random_tensor(8, 11, 1, 1)), InvalidArgument);
}

TEST(Sim, Identities) {
  const Tensor m = random_tensor(8, 10, 1, 2);
  EXPECT_NEAR(sim(m, m), 1.0, 1e-15);
  EXPECT_NEAR(sim(m, affine(m, 4, 0)), 1.0, 1e-14);
  Tensor left(4, 4, 1, 0.0), right(4, 4, 1, 0.0);
  for (Index y = 0; y < 4; ++y) {
    left(y, 0) = 1;
    right(y, 3) = 2;
  }
  EXPECT_EQ(sim(left, right), 0.0);
  EXPECT_THROW(sim(Tensor(4, 4, 1, 1.0), Tensor(5, 5, 1, 1.0)), InvalidArgument);
  EXPECT_THROW(sim(m, Tensor(8, 10, 1, 0.0)), UndefinedMetric);
  EXPECT_THROW(sim(m, affine(m, 1, -0.5)), UndefinedMetric);
}

TEST(Nss, Identities) {
  const Tensor m = random_tensor(8, 10, 1, 3);
  FixationMap all{8, 10, {}};
  for (Index y = 0; y < 8; ++y)
    for (Index x = 0; x < 10; ++x) all.points.push_back({x, y});
  EXPECT_NEAR(nss(m, all), 0.0, 1e-13);
  Index arg;
  const double mx = m.matrix().col(0).maxCoeff(&arg);
  const double mean = m.matrix().mean();
  const double sd = std::sqrt((m.matrix().array() - mean).square().mean());
  EXPECT_NEAR(nss(m, FixationMap{8, 10, {{arg % 10, arg / 10}}}), (mx - mean) / sd, 1e-12);
  EXPECT_THROW(nss(Tensor(8, 10, 1, 1.0), all), UndefinedMetric);
  EXPECT_THROW(nss(m, FixationMap{8, 10, {}}), UndefinedMetric);
  EXPECT_THROW(nss(m, FixationMap{8, 10, {{10, 0}}}), InvalidArgument);
  EXPECT_THROW(nss(m, FixationMap{8, 9, {{1, 1}}}), InvalidArgument);
}

TEST(AucJudd, Identities) {
  Tensor m = random_tensor(6, 6, 1, 4, 0.0, 0.5);
  m(1, 1) = 0.9;
  m(4, 2) = 0.95;
  EXPECT_DOUBLE_EQ(auc_judd(m, FixationMap{6, 6, {{1, 1}, {2, 4}}}), 1.0);
  EXPECT_DOUBLE_EQ(auc_judd(Tensor(6, 6, 1, 0.3), FixationMap{6, 6, {{1, 1}, {2, 4}}}), 0.5);
  FixationMap every{2, 2, {{0, 0}, {1, 0}, {0, 1}, {1, 1}}};
  EXPECT_THROW(auc_judd(random_tensor(2, 2, 1, 1), every), UndefinedMetric);
}

TEST(AucJudd, MatchesThresholdScanOn6x6) {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor m = random_tensor(6, 6, 1, 100 + trial);
    const FixationMap f = testing::random_fixations(6, 6, 4, rng);
    EXPECT_NEAR(auc_judd(m, f), testing::oracle_auc_judd(m, f), 1e-12);
  }
  // Ties between fixated and background values.
  Tensor q(6, 6, 1);
  for (Index i = 0; i < 36; ++i) q.matrix()(i, 0) = double(i % 4);
  const FixationMap f{6, 6, {{0, 0}, {3, 0}, {5, 5}, {2, 2}}};
  EXPECT_NEAR(auc_judd(q, f), testing::oracle_auc_judd(q, f), 1e-12);
}

TEST(Metrics, RandomInstancesMatchDefinitions) {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor pred = random_tensor(8, 10, 1, 500 + trial);
    const Tensor gt = random_tensor(8, 10, 1, 900 + trial);
    const FixationMap f = testing::random_fixations(8, 10, 5, rng);
    std::vector<FixationMap> others;
    for (int k = 0; k < 3; ++k) others.push_back(testing::random_fixations(16, 20, 4, rng));
    EXPECT_NEAR(cc(pred, gt), testing::oracle_cc(pred, gt), 1e-12);
    EXPECT_NEAR(sim(pred, gt), testing::oracle_sim(pred, gt), 1e-12);
    EXPECT_NEAR(nss(pred, f), testing::oracle_nss(pred, f), 1e-12);
    EXPECT_NEAR(auc_judd(pred, f), testing::oracle_auc_judd(pred, f), 1e-12);
    // 12 pooled negatives never exceed the 10x cap, so nothing is subsampled.
    EXPECT_NEAR(shuffled_auc(pred, f, others), testing::oracle_shuffled_auc_unsampled(pred, f, others), 1e-12);
  }
}

TEST(Metrics, PositiveAffineInvariance) {
  Rng rng(5);
  const Tensor pred = random_tensor(8, 10, 1, 61), gt = random_tensor(8, 10, 1, 62);
  const FixationMap f = testing::random_fixations(8, 10, 6, rng);
  const std::vector<FixationMap> others = {testing::random_fixations(8, 10, 30, rng)};
  const Tensor p2 = affine(pred, 3.0, 0.5);
  EXPECT_NEAR(cc(p2, gt), cc(pred, gt), 1e-14);
  EXPECT_NEAR(nss(p2, f), nss(pred, f), 1e-13);
  EXPECT_EQ(auc_judd(p2, f), auc_judd(pred, f));
  EXPECT_EQ(shuffled_auc(p2, f, others), shuffled_auc(pred, f, others));
  EXPECT_NEAR(sim(affine(pred, 7.0, 0.0), affine(gt, 0.2, 0.0)), sim(pred, gt), 1e-14);
}

TEST(ShuffledAuc, CenterBiasIsDiscounted) {
  const auto fix = testing::center_biased_fixations(20, 48, 64, 40, 9);
  const Tensor prior = center_prior_scaled(48, 64, 1.0 / 3.0);
  double sauc = 0, aucj = 0;
  for (size_t i = 0; i < fix.size(); ++i) {
    std::vector<FixationMap> others;
    for (size_t j = 0; j < fix.size(); ++j)
      if (j != i) others.push_back(fix[j]);
    sauc += shuffled_auc(prior, fix[i], others);
    aucj += auc_judd(prior, fix[i]);
  }
  sauc /= double(fix.size());
  aucj /= double(fix.size());
  EXPECT_NEAR(sauc, 0.5, 0.05);
  EXPECT_GT(aucj, 0.8);
}

TEST(ShuffledAuc, SamplingContract) {
  Rng rng(3);
  const Tensor pred = random_tensor(20, 20, 1, 8);
  const FixationMap f = testing::random_fixations(20, 20, 10, rng);
  const std::vector<FixationMap> same = {f};
  EXPECT_DOUBLE_EQ(shuffled_auc(pred, f, same), 0.5);
  std::vector<FixationMap> many;
  for (int k = 0; k < 5; ++k) many.push_back(testing::random_fixations(40, 40, 100, rng));
  const double a = shuffled_auc(pred, f, many), b = shuffled_auc(pred, f, many);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, shuffled_auc(pred, f, many, 1234));
  EXPECT_GE(a, 0.0);
  EXPECT_LE(a, 1.0);
  EXPECT_THROW(shuffled_auc(pred, f, std::vector<FixationMap>{}), InvalidArgument);
  EXPECT_THROW(shuffled_auc(pred, f, std::vector<FixationMap>{FixationMap{5, 5, {}}}), UndefinedMetric);
  EXPECT_THROW(shuffled_auc(pred, f, many, 1, 0), InvalidArgument);
}

TEST(FixationMap, RescaleDedupAndMask) {
  const FixationMap f{480, 640, {{0, 0}, {639, 479}, {1, 1}, {1, 1}, {320, 240}}};
  EXPECT_EQ(f.pixel_indices().size(), 4u);
  const FixationMap r = f.rescaled({120, 160});
  EXPECT_EQ(r.points[0], (FixationPoint{0, 0}));
  EXPECT_EQ(r.points[1], (FixationPoint{159, 119}));
  EXPECT_EQ(r.points[4], (FixationPoint{80, 60}));
  EXPECT_EQ(r.pixel_indices().size(), 3u);
  const Tensor m = FixationMap{2, 3, {{2, 1}}}.mask();
  EXPECT_EQ(m.matrix().sum(), 1.0);
  EXPECT_EQ(m(1, 2), 1.0);
  const FixationMap up = FixationMap{2, 2, {{1, 0}}}.rescaled({4, 4});
  EXPECT_EQ(up.points[0], (FixationPoint{3, 1}));  // centre (1.5, 0.5) scaled by 2
}

TEST(MetricReport, MeansRow) {
  MetricReport r;
  r.rows.push_back({"a", 0.5, 0.6, 0.1, 0.2, 1.0});
  r.rows.push_back({"b", 0.7, 0.8, 0.3, 0.4, 2.0});
  const MetricRow m = r.means();
  EXPECT_EQ(m.image, "mean");
  EXPECT_DOUBLE_EQ(m.auc_j, 0.6);
  EXPECT_DOUBLE_EQ(m.nss, 1.5);
}

}  // namespace
}  // namespace fovea
