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

#include "fovea/model.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "fovea/image_io.hpp"
#include "fovea/parallel.hpp"

namespace fovea {
namespace {

std::int64_t build_timestamp() {
  const char* e = std::getenv("SOURCE_DATE_EPOCH");
  if (!e || !*e) return 0;
  char* end = nullptr;
  const long long v = std::strtoll(e, &end, 10);
  return (end && *end == '\0') ? v : 0;
}

ModelBundle train_on_samples(const std::vector<TrainingSample>& samples, const ModelConfig& cfg,
                             const std::string& dataset_name, const FitLogger& log) {
  cfg.validate();
  const FitContext ctx{cfg.seed, cfg.jobs, log};
  const auto t0 = std::chrono::steady_clock::now();
  const size_t n = samples.size();

  ModelBundle b;
  b.config = cfg;
  b.pipeline = fit_feature_pipeline(samples, cfg.pipeline, ctx);

  const auto features = [&](size_t i) { return extract_feature_sets_d4(samples[i].d4_image, b.pipeline); };
  b.heads = fit_paths(n, features, samples, cfg.pipeline, cfg.prediction, ctx);
  b.ensemble = fit_ensemble(
      n, [&](size_t i) { return predict_paths(features(i), b.heads); }, samples, cfg.pipeline, cfg.prediction, ctx);

  b.meta.dataset_name = dataset_name;
  b.meta.image_count = n;
  b.meta.seed = cfg.seed;
  b.meta.timestamp = build_timestamp();
  std::ostringstream os;
  os << "trained on " << n << " images in "
     << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s";
  ctx.info(os.str());
  return b;
}

std::string format_row(const MetricRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, ",%.6f,%.6f,%.6f,%.6f,%.6f\n", r.auc_j, r.s_auc, r.cc, r.sim, r.nss);
  return r.image + buf;
}

}  // namespace

ModelBundle train_model(std::span<const TrainingImage> data, const ModelConfig& cfg, const std::string& dataset_name,
                        const FitLogger& log) {
  std::vector<TrainingSample> samples(data.size());
  parallel_for(static_cast<std::int64_t>(data.size()), cfg.jobs,
               [&](std::int64_t i) { samples[i] = make_training_sample(data[i].image, data[i].gt); });
  return train_on_samples(samples, cfg, dataset_name, log);
}

ModelBundle train_from_manifest(const DatasetManifest& manifest, const ModelConfig& cfg, const FitLogger& log) {
  const auto entries = manifest.split(Split::kTrain);
  if (entries.size() < 2) throw FitError("training needs at least 2 entries in the train split");
  std::vector<TrainingSample> samples(entries.size());
  parallel_for(static_cast<std::int64_t>(entries.size()), cfg.jobs, [&](std::int64_t i) {
    const DatasetEntry& e = *entries[i];
    samples[i] = make_training_sample(load_and_normalize(manifest.resolve(e.image)),
                                      load_saliency_map(manifest.resolve(e.gt)));
  });
  if (log) log("loaded " + std::to_string(samples.size()) + " training images");
  std::string name = manifest.root.filename().string();
  if (name.empty()) name = std::filesystem::absolute(manifest.root).filename().string();
  return train_on_samples(samples, cfg, name, log);
}

PredictionResult predict_image(const ModelBundle& bundle, const Tensor& image480) {
  if (!bundle.fitted()) throw InvalidState("model is not fitted");
  PredictionResult r;
  r.paths = predict_paths(extract_feature_sets(image480, bundle.pipeline), bundle.heads);
  r.fused = ensemble_fuse(r.paths, bundle.ensemble);
  r.saliency = post_process(r.fused, bundle.config.postprocess);
  return r;
}

std::array<Tensor, kEnsembleMaps> post_processed_paths(const PathMaps& paths, const PostProcessConfig& cfg) {
  const auto inputs = paths.fused_inputs();
  std::array<Tensor, kEnsembleMaps> out;
  for (int k = 0; k < kEnsembleMaps; ++k) out[k] = post_process(*inputs[k], cfg);
  return out;
}

MetricRow score_map(const std::string& name, const Tensor& pred, const Tensor& gt, const FixationMap& fix,
                    std::span<const FixationMap> others, const EvaluationConfig& cfg) {
  MetricRow r;
  r.image = name;
  r.auc_j = auc_judd(pred, fix);
  r.s_auc = shuffled_auc(pred, fix, others, cfg.shuffled_seed, cfg.shuffled_ratio);
  r.cc = cc(pred, gt);
  r.sim = sim(pred, gt);
  r.nss = nss(pred, fix);
  return r;
}

std::vector<const DatasetEntry*> evaluation_entries(const DatasetManifest& manifest) {
  auto test = manifest.split(Split::kTest);
  if (!test.empty()) return test;
  std::vector<const DatasetEntry*> all;
  for (const auto& e : manifest.entries) all.push_back(&e);
  return all;
}

EvaluationResult evaluate_bundle(const ModelBundle& bundle, const DatasetManifest& manifest,
                                 const std::vector<const DatasetEntry*>& entries, const EvaluationConfig& cfg,
                                 bool with_paths, int jobs) {
  if (entries.size() < 2) throw InvalidArgument("evaluation needs at least 2 images (shuffled AUC)");
  const size_t n = entries.size();
  std::vector<FixationMap> fixations(n);
  for (size_t i = 0; i < n; ++i) fixations[i] = entries[i]->working_fixations();

  EvaluationResult res;
  res.ensemble.rows.resize(n);
  if (with_paths)
    for (auto& p : res.paths) p.rows.resize(n);
  parallel_for(static_cast<std::int64_t>(n), jobs, [&](std::int64_t i) {
    const DatasetEntry& e = *entries[i];
    std::vector<FixationMap> others;
    others.reserve(n - 1);
    for (size_t j = 0; j < n; ++j)
      if (j != static_cast<size_t>(i)) others.push_back(fixations[j]);
    const Tensor gt = load_saliency_map(manifest.resolve(e.gt));
    const PredictionResult pr = predict_image(bundle, load_and_normalize(manifest.resolve(e.image)));
    res.ensemble.rows[i] = score_map(e.image, pr.saliency, gt, fixations[i], others, cfg);
    if (with_paths) {
      const auto maps = post_processed_paths(pr.paths, bundle.config.postprocess);
      for (int k = 0; k < kEnsembleMaps; ++k) res.paths[k].rows[i] = score_map(e.image, maps[k], gt, fixations[i], others, cfg);
    }
  });
  return res;
}

std::string metric_csv(const MetricReport& report) {
  std::string out = "image,auc_j,s_auc,cc,sim,nss\n";
  for (const auto& r : report.rows) out += format_row(r);
  out += format_row(report.means());
  return out;
}

std::string rft_curves_csv(const ModelBundle& bundle) {
  std::ostringstream os;
  os << "stage,rank,feature,loss\n";
  auto emit = [&](const std::string& stage, const RftResult& r) {
    char buf[64];
    for (size_t k = 0; k < r.ranking.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.10g", r.loss[static_cast<size_t>(r.ranking[k])]);
      os << stage << "," << k + 1 << "," << r.ranking[k] << "," << buf << "\n";
    }
  };
  for (const auto& L : bundle.pipeline.layers) {
    if (!L.forward3.fitted()) continue;
    emit(std::string(level_name(L.level)) + ".forward3", L.forward3);
    emit(std::string(level_name(L.level)) + ".forward5", L.forward5);
  }
  for (int s = 0; s < kSetCount; ++s) emit(std::string("map.") + level_name(set_level(s)), bundle.heads.map[s].rft);
  emit("residual.d16", bundle.heads.residual16.rft);
  emit("residual.d8", bundle.heads.residual8.rft);
  return os.str();
}

}  // namespace fovea
