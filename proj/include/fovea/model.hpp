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

// End-to-end model: training, inference and dataset evaluation.

#ifndef FOVEA_MODEL_HPP_
#define FOVEA_MODEL_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fovea/config.hpp"
#include "fovea/dataset.hpp"
#include "fovea/metrics.hpp"
#include "fovea/pipeline.hpp"
#include "fovea/prediction.hpp"

namespace fovea {

inline constexpr std::uint32_t kBundleVersion = 1;

struct TrainingMeta {
  std::string dataset_name;
  std::uint64_t image_count = 0;
  std::uint64_t seed = 0;
  std::int64_t timestamp = 0;  // SOURCE_DATE_EPOCH when set, else 0
};

struct ModelBundle {
  std::uint32_t format_version = kBundleVersion;
  ModelConfig config;
  TrainingMeta meta;
  FeaturePipeline pipeline;
  PathHeads heads;
  EnsembleHead ensemble;

  bool fitted() const { return pipeline.fitted() && heads.fitted() && ensemble.fitted(); }
};

/// Training pair at the 480x640 working resolution.
struct TrainingImage {
  Tensor image;  // YUV
  Tensor gt;     // saliency on [0,1]
};

ModelBundle train_model(std::span<const TrainingImage> data, const ModelConfig& cfg, const std::string& dataset_name,
                        const FitLogger& log = {});

/// Trains on the manifest's train split.
ModelBundle train_from_manifest(const DatasetManifest& manifest, const ModelConfig& cfg, const FitLogger& log = {});

struct PredictionResult {
  PathMaps paths;
  Tensor fused;     // d4
  Tensor saliency;  // 480x640 on [0,1]
};

PredictionResult predict_image(const ModelBundle& bundle, const Tensor& image480);

/// Per-path maps post-processed like the fused map, in the order P8, P16,
/// P32c, P64c.
std::array<Tensor, kEnsembleMaps> post_processed_paths(const PathMaps& paths, const PostProcessConfig& cfg);

inline constexpr const char* kPathNames[kEnsembleMaps] = {"p8", "p16", "p32c", "p64c"};

/// Metrics of one predicted map against an entry's ground truth.
MetricRow score_map(const std::string& name, const Tensor& pred, const Tensor& gt, const FixationMap& fix,
                    std::span<const FixationMap> others, const EvaluationConfig& cfg);

struct EvaluationResult {
  MetricReport ensemble;
  std::array<MetricReport, kEnsembleMaps> paths;  // filled when requested
};

/// Scores every listed entry; s-AUC negatives come from the other listed entries.
EvaluationResult evaluate_bundle(const ModelBundle& bundle, const DatasetManifest& manifest,
                                 const std::vector<const DatasetEntry*>& entries, const EvaluationConfig& cfg,
                                 bool with_paths, int jobs);

/// Entries of the test split, or every entry when there is none.
std::vector<const DatasetEntry*> evaluation_entries(const DatasetManifest& manifest);

/// CSV: `image,auc_j,s_auc,cc,sim,nss`, one row per image plus a mean row.
std::string metric_csv(const MetricReport& report);

/// Per-stage RFT curves as CSV (stage,rank,feature,loss).
std::string rft_curves_csv(const ModelBundle& bundle);

}  // namespace fovea

#endif  // FOVEA_MODEL_HPP_
