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

// Gradient-boosted regression trees under squared loss.
//
// Features are quantized once per fit into at most `histogram_bins` bins
// whose edges are training values taken at quantile positions; each split
// sends x < edge to the left child. Leaves hold the mean residual of their
// (subsampled) rows.

#ifndef FOVEA_GBT_HPP_
#define FOVEA_GBT_HPP_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fovea/tensor.hpp"

namespace fovea {

struct GbtConfig {
  int tree_count = 300;
  int max_depth = 6;
  double learning_rate = 0.1;
  double subsample = 0.8;
  int min_samples_leaf = 20;
  int histogram_bins = 64;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Pre-order node array. An internal node's left child is the next node;
/// `right` indexes the right child. Leaves have feature == -1.
struct TreeNode {
  std::int32_t feature = -1;
  std::int32_t right = -1;
  double value = 0.0;  // split threshold, or leaf output
};

struct RegressionTree {
  std::vector<TreeNode> nodes;

  template <typename Row>
  double predict(const Row& x) const {
    std::int32_t i = 0;
    while (nodes[i].feature >= 0) i = x[nodes[i].feature] < nodes[i].value ? i + 1 : nodes[i].right;
    return nodes[i].value;
  }
  Index leaf_count() const;
};

struct GbtModel {
  double base_prediction = 0.0;
  double learning_rate = 0.1;
  int feature_count = 0;
  std::vector<RegressionTree> trees;
  std::vector<double> training_mse;  // after each boosting round
  GbtConfig config;

  bool fitted() const { return feature_count > 0; }
  Index node_count() const;
};

/// Fits on row-major samples. `jobs` parallelizes histogram construction
/// over features; results do not depend on it.
GbtModel gbt_fit(const Eigen::Ref<const RowMatrix<double>>& features, const Eigen::Ref<const Eigen::VectorXd>& target,
                 const GbtConfig& cfg, int jobs = 1);

Eigen::VectorXd gbt_predict(const GbtModel& model, const Eigen::Ref<const RowMatrix<double>>& features);

/// Same as gbt_predict on gather_columns(features, columns), without the copy.
Eigen::VectorXd gbt_predict(const GbtModel& model, const Eigen::Ref<const RowMatrix<double>>& features,
                            const std::vector<int>& columns);

double gbt_predict_row(const GbtModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& row);

/// Indented text dump of every tree.
void dump_trees(std::ostream& os, const GbtModel& model);

}  // namespace fovea

#endif  // FOVEA_GBT_HPP_
