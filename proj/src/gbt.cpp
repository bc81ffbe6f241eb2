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

#include "fovea/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "fovea/parallel.hpp"
#include "fovea/random.hpp"

namespace fovea {

void GbtConfig::validate() const {
  if (tree_count < 1) throw InvalidArgument("gbt: tree_count must be >= 1");
  if (max_depth < 1) throw InvalidArgument("gbt: max_depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw InvalidArgument("gbt: learning_rate must be in (0, 1]");
  if (!(subsample > 0.0 && subsample <= 1.0)) throw InvalidArgument("gbt: subsample must be in (0, 1]");
  if (min_samples_leaf < 1) throw InvalidArgument("gbt: min_samples_leaf must be >= 1");
  if (histogram_bins < 2 || histogram_bins > 256) throw InvalidArgument("gbt: histogram_bins must be in [2, 256]");
}

Index RegressionTree::leaf_count() const {
  return std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; });
}

Index GbtModel::node_count() const {
  Index n = 0;
  for (const auto& t : trees) n += static_cast<Index>(t.nodes.size());
  return n;
}

namespace {

// Quantized training matrix, feature-major.
struct BinnedData {
  Index rows = 0;
  Index cols = 0;
  int stride = 0;                            // histogram slots per feature
  std::vector<std::uint8_t> bins;            // cols * rows
  std::vector<std::vector<double>> edges;    // per feature, ascending

  std::uint8_t at(Index f, Index r) const { return bins[static_cast<size_t>(f * rows + r)]; }
};

BinnedData quantize(const Eigen::Ref<const RowMatrix<double>>& X, int max_bins, int jobs) {
  BinnedData d;
  d.rows = X.rows();
  d.cols = X.cols();
  d.stride = max_bins;
  d.bins.resize(static_cast<size_t>(d.rows * d.cols));
  d.edges.resize(static_cast<size_t>(d.cols));
  parallel_for(d.cols, jobs, [&](std::int64_t f) {
    std::vector<double> sorted(static_cast<size_t>(d.rows));
    for (Index r = 0; r < d.rows; ++r) sorted[r] = X(r, f);
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> uniq;
    std::unique_copy(sorted.begin(), sorted.end(), std::back_inserter(uniq));
    auto& e = d.edges[f];
    if (static_cast<int>(uniq.size()) <= max_bins) {
      e.assign(uniq.begin() + 1, uniq.end());
    } else {
      for (int j = 1; j < max_bins; ++j) {
        const double v = sorted[static_cast<size_t>(Index(j) * d.rows / max_bins)];
        if (v > sorted.front() && (e.empty() || v > e.back())) e.push_back(v);
      }
    }
    for (Index r = 0; r < d.rows; ++r) {
      d.bins[static_cast<size_t>(f * d.rows + r)] =
          static_cast<std::uint8_t>(std::upper_bound(e.begin(), e.end(), X(r, f)) - e.begin());
    }
  });
  return d;
}

struct Histogram {
  std::vector<double> sum;
  std::vector<std::int32_t> count;
};

struct SplitChoice {
  Index feature = -1;
  int bin = 0;  // left = bins < bin
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const BinnedData& data, const std::vector<double>& resid, const GbtConfig& cfg, int jobs)
      : data_(data), resid_(resid), cfg_(cfg), jobs_(jobs) {}

  RegressionTree build(std::vector<std::int32_t> rows, std::vector<std::int32_t>& split_bins) {
    tree_ = {};
    split_bins_.clear();
    Histogram h = histogram(rows);
    grow(rows, 0, std::move(h));
    split_bins = split_bins_;
    return std::move(tree_);
  }

 private:
  Histogram histogram(const std::vector<std::int32_t>& rows) const {
    const size_t slots = static_cast<size_t>(data_.cols) * data_.stride;
    Histogram h{std::vector<double>(slots, 0.0), std::vector<std::int32_t>(slots, 0)};
    parallel_for(data_.cols, jobs_, [&](std::int64_t f) {
      const std::uint8_t* col = data_.bins.data() + static_cast<size_t>(f * data_.rows);
      double* s = h.sum.data() + static_cast<size_t>(f) * data_.stride;
      std::int32_t* c = h.count.data() + static_cast<size_t>(f) * data_.stride;
      for (auto r : rows) {
        const auto b = col[r];
        s[b] += resid_[r];
        c[b] += 1;
      }
    });
    return h;
  }

  SplitChoice best_split(const Histogram& h, Index n, double total) const {
    SplitChoice best;
    const double parent = total * total / double(n);
    for (Index f = 0; f < data_.cols; ++f) {
      const int nb = static_cast<int>(data_.edges[f].size()) + 1;
      const double* s = h.sum.data() + static_cast<size_t>(f) * data_.stride;
      const std::int32_t* c = h.count.data() + static_cast<size_t>(f) * data_.stride;
      double ls = 0;
      Index ln = 0;
      for (int b = 1; b < nb; ++b) {
        ls += s[b - 1];
        ln += c[b - 1];
        const Index rn = n - ln;
        if (ln < cfg_.min_samples_leaf) continue;
        if (rn < cfg_.min_samples_leaf) break;
        const double rs = total - ls;
        const double gain = ls * ls / double(ln) + rs * rs / double(rn) - parent;
        if (gain > best.gain) best = {f, b, gain};
      }
    }
    return best;
  }

  void grow(std::vector<std::int32_t>& rows, int depth, Histogram h) {
    const Index n = static_cast<Index>(rows.size());
    double total = 0;
    for (auto r : rows) total += resid_[r];
    const std::int32_t self = static_cast<std::int32_t>(tree_.nodes.size());
    tree_.nodes.push_back({});
    split_bins_.push_back(0);

    SplitChoice split;
    if (depth < cfg_.max_depth && n >= 2 * Index(cfg_.min_samples_leaf)) split = best_split(h, n, total);
    if (split.feature < 0) {
      tree_.nodes[self].value = n > 0 ? total / double(n) : 0.0;
      return;
    }
    tree_.nodes[self].feature = static_cast<std::int32_t>(split.feature);
    tree_.nodes[self].value = data_.edges[split.feature][split.bin - 1];
    split_bins_[self] = split.bin;

    std::vector<std::int32_t> left, right;
    left.reserve(rows.size());
    right.reserve(rows.size());
    for (auto r : rows) (data_.at(split.feature, r) < split.bin ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();

    // Build the smaller child's histogram directly, derive the other.
    const bool left_small = left.size() <= right.size();
    Histogram small = histogram(left_small ? left : right);
    Histogram large = std::move(h);
    for (size_t i = 0; i < large.sum.size(); ++i) {
      large.sum[i] -= small.sum[i];
      large.count[i] -= small.count[i];
    }
    Histogram& hl = left_small ? small : large;
    Histogram& hr = left_small ? large : small;
    grow(left, depth + 1, std::move(hl));
    tree_.nodes[self].right = static_cast<std::int32_t>(tree_.nodes.size());
    grow(right, depth + 1, std::move(hr));
  }

  const BinnedData& data_;
  const std::vector<double>& resid_;
  const GbtConfig& cfg_;
  int jobs_;
  RegressionTree tree_;
  std::vector<std::int32_t> split_bins_;
};

double leaf_for_row(const RegressionTree& t, const std::vector<std::int32_t>& split_bins, const BinnedData& d,
                    Index r) {
  std::int32_t i = 0;
  while (t.nodes[i].feature >= 0) {
    i = d.at(t.nodes[i].feature, r) < split_bins[i] ? i + 1 : t.nodes[i].right;
  }
  return t.nodes[i].value;
}

}  // namespace

GbtModel gbt_fit(const Eigen::Ref<const RowMatrix<double>>& features, const Eigen::Ref<const Eigen::VectorXd>& target,
                 const GbtConfig& cfg, int jobs) {
  cfg.validate();
  const Index n = features.rows();
  if (features.cols() < 1) throw InvalidArgument("gbt_fit: no features");
  if (target.size() != n) throw InvalidArgument("gbt_fit: target length does not match rows");
  if (n < 2) throw InvalidArgument("gbt_fit: need at least 2 samples");
  if (n < cfg.min_samples_leaf) throw FitError("gbt_fit: fewer samples than min_samples_leaf");
  if (n > std::numeric_limits<std::int32_t>::max()) throw InvalidArgument("gbt_fit: too many samples");
  if (!features.allFinite() || !target.allFinite()) throw InvalidArgument("gbt_fit: non-finite input");

  GbtModel model;
  model.config = cfg;
  model.learning_rate = cfg.learning_rate;
  model.feature_count = static_cast<int>(features.cols());
  // Shifted mean: exact for constant targets.
  const double y0 = target(0);
  model.base_prediction = y0 + (target.array() - y0).sum() / double(n);

  const BinnedData data = quantize(features, cfg.histogram_bins, jobs);
  std::vector<double> pred(static_cast<size_t>(n), model.base_prediction);
  std::vector<double> resid(static_cast<size_t>(n));
  const Index m = cfg.subsample >= 1.0 ? n : std::max<Index>(1, std::llround(cfg.subsample * double(n)));

  TreeBuilder builder(data, resid, cfg, jobs);
  model.trees.reserve(static_cast<size_t>(cfg.tree_count));
  model.training_mse.reserve(static_cast<size_t>(cfg.tree_count));
  for (int t = 0; t < cfg.tree_count; ++t) {
    for (Index i = 0; i < n; ++i) resid[i] = target(i) - pred[i];
    std::vector<std::int32_t> rows;
    if (m == n) {
      rows.resize(static_cast<size_t>(n));
      for (Index i = 0; i < n; ++i) rows[i] = static_cast<std::int32_t>(i);
    } else {
      for (auto i : sample_indices(n, m, derive_seed(cfg.seed, {static_cast<std::uint64_t>(t)})))
        rows.push_back(static_cast<std::int32_t>(i));
    }
    std::vector<std::int32_t> split_bins;
    RegressionTree tree = builder.build(std::move(rows), split_bins);
    double mse = 0;
    for (Index i = 0; i < n; ++i) {
      pred[i] += cfg.learning_rate * leaf_for_row(tree, split_bins, data, i);
      const double r = target(i) - pred[i];
      mse += r * r;
    }
    model.training_mse.push_back(mse / double(n));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

double gbt_predict_row(const GbtModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  if (!model.fitted()) throw InvalidState("gbt_predict: model is not fitted");
  if (row.size() != model.feature_count) throw InvalidArgument("gbt_predict: feature width mismatch");
  double p = model.base_prediction;
  for (const auto& t : model.trees) p += model.learning_rate * t.predict(row);
  return p;
}

namespace {

Eigen::VectorXd predict_blocked(const GbtModel& model, const std::vector<RegressionTree>& trees,
                                const Eigen::Ref<const RowMatrix<double>>& features) {
  // Row blocks keep one tree hot in cache across many rows. Each row still
  // accumulates trees in order, so results match gbt_predict_row exactly.
  const Index n = features.rows();
  const Index block = std::clamp<Index>(Index(32768) / std::max<Index>(1, features.cols()), 8, 256);
  Eigen::VectorXd out = Eigen::VectorXd::Constant(n, model.base_prediction);
  for (Index b = 0; b < n; b += block) {
    const Index e = std::min(n, b + block);
    for (const auto& t : trees)
      for (Index i = b; i < e; ++i) out(i) += model.learning_rate * t.predict(features.row(i).data());
  }
  return out;
}

}  // namespace

Eigen::VectorXd gbt_predict(const GbtModel& model, const Eigen::Ref<const RowMatrix<double>>& features) {
  if (!model.fitted()) throw InvalidState("gbt_predict: model is not fitted");
  if (features.cols() != model.feature_count)
    throw InvalidArgument("gbt_predict: expected " + std::to_string(model.feature_count) + " features, got " +
                          std::to_string(features.cols()));
  return predict_blocked(model, model.trees, features);
}

Eigen::VectorXd gbt_predict(const GbtModel& model, const Eigen::Ref<const RowMatrix<double>>& features,
                            const std::vector<int>& columns) {
  if (!model.fitted()) throw InvalidState("gbt_predict: model is not fitted");
  if (static_cast<int>(columns.size()) != model.feature_count)
    throw InvalidArgument("gbt_predict: expected " + std::to_string(model.feature_count) + " columns, got " +
                          std::to_string(columns.size()));
  for (int c : columns)
    if (c < 0 || c >= features.cols()) throw InvalidArgument("gbt_predict: column out of range");
  std::vector<RegressionTree> trees = model.trees;
  for (auto& t : trees)
    for (auto& nd : t.nodes)
      if (nd.feature >= 0) nd.feature = columns[static_cast<size_t>(nd.feature)];
  return predict_blocked(model, trees, features);
}

void dump_trees(std::ostream& os, const GbtModel& model) {
  os << "base " << model.base_prediction << " lr " << model.learning_rate << " trees " << model.trees.size()
     << "\n";
  for (size_t t = 0; t < model.trees.size(); ++t) {
    os << "tree " << t << "\n";
    const auto& nodes = model.trees[t].nodes;
    // Explicit stack of (node, depth) in pre-order.
    std::vector<std::pair<std::int32_t, int>> stack{{0, 1}};
    while (!stack.empty()) {
      const auto [i, depth] = stack.back();
      stack.pop_back();
      os << std::string(static_cast<size_t>(2 * depth), ' ');
      if (nodes[i].feature < 0) {
        os << "leaf " << nodes[i].value << "\n";
      } else {
        os << "f" << nodes[i].feature << " < " << nodes[i].value << "\n";
        stack.emplace_back(nodes[i].right, depth + 1);
        stack.emplace_back(i + 1, depth + 1);
      }
    }
  }
}

}  // namespace fovea
