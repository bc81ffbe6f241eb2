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

// Relevant Feature Test: supervised ranking of feature dimensions by the
// best two-segment regression MSE over uniformly binned thresholds.

#ifndef FOVEA_RFT_HPP_
#define FOVEA_RFT_HPP_

#include <vector>

#include "fovea/tensor.hpp"

namespace fovea {

/// Statistics of every candidate threshold for one feature.
struct RftBinStats {
  std::vector<double> thresholds;  // f_min + t (f_max - f_min) / B, t = 1..B-1
  std::vector<Index> left_count;
  std::vector<Index> right_count;
  std::vector<double> left_mse;
  std::vector<double> right_mse;
  std::vector<double> loss;  // (N_L R_L + N_R R_R) / N; NaN when one side is empty
};

struct RftResult {
  int bins = 0;
  std::vector<double> loss;       // R_op per feature
  std::vector<int> ranking;       // feature indices, ascending loss, ties by index
  std::vector<int> selected;      // first K of ranking
  std::vector<double> f_min;
  std::vector<double> f_max;

  bool fitted() const { return bins > 0; }
};

using FeatureMatrix = RowMatrix<double>;

/// Candidate-threshold statistics of one column (exposed for inspection).
RftBinStats rft_bin_stats(const Eigen::Ref<const Eigen::VectorXd>& feature,
                          const Eigen::Ref<const Eigen::VectorXd>& target, int bins);

/// Ranks every column. `selected` holds the full ranking.
RftResult rft_rank(const Eigen::Ref<const FeatureMatrix>& features,
                   const Eigen::Ref<const Eigen::VectorXd>& target, int bins, int jobs = 1);

/// Ranks and keeps the first `keep` indices.
RftResult rft_select(const Eigen::Ref<const FeatureMatrix>& features,
                     const Eigen::Ref<const Eigen::VectorXd>& target, int bins, int keep, int jobs = 1);

/// Columns of `features` listed in `selected`, in that order.
FeatureMatrix gather_columns(const Eigen::Ref<const FeatureMatrix>& features, const std::vector<int>& selected);

}  // namespace fovea

#endif  // FOVEA_RFT_HPP_
