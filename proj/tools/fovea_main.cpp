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

// fovea: train / predict / evaluate / inspect.
//
// Failures print one line `error[<kind>]: <message>` on stderr and exit
// with 2 (usage), 3 (data) or 4 (model).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "fovea/atomic_file.hpp"
#include "fovea/bundle.hpp"
#include "fovea/image_io.hpp"
#include "fovea/model.hpp"

namespace fs = std::filesystem;
using namespace fovea;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;

  ModelConfig load() const {
    ModelConfig cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    cfg.validate();
    return cfg;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "Config file (key = value lines)");
  app->add_option("--seed", c.seed, "Root random seed");
  app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_train(const std::string& manifest_path, const std::string& out, const Common& common) {
  const ModelConfig cfg = common.load();
  const DatasetManifest manifest = ingest_dataset(manifest_path);
  std::string log_text;
  const auto start = std::chrono::steady_clock::now();
  const FitLogger log = [&](const std::string& msg) {
    char stamp[32];
    std::snprintf(stamp, sizeof stamp, "[%8.2f s] ", seconds_since(start));
    std::cerr << stamp << msg << "\n";
    log_text += stamp + msg + "\n";
  };
  const ModelBundle bundle = train_from_manifest(manifest, cfg, log);
  save_bundle(bundle, out);
  log("wrote " + out + " (" + std::to_string(fs::file_size(out)) + " bytes)");
  std::string full = log_text;
  full += "\n# config\n" + config_to_text(cfg);
  full += "\n# shapes\n" + describe_shapes(bundle.pipeline);
  full += "\n# rft curves\n" + rft_curves_csv(bundle);
  write_text_atomically(out + ".log", full);
  return 0;
}

int run_predict(const std::string& bundle_path, const std::vector<std::string>& images, const std::string& out_dir,
                bool per_path) {
  const ModelBundle bundle = load_bundle(bundle_path);
  fs::create_directories(out_dir);
  for (const auto& img : images) {
    const auto t0 = std::chrono::steady_clock::now();
    const PredictionResult r = predict_image(bundle, load_and_normalize(img));
    const double elapsed = seconds_since(t0);
    const std::string stem = fs::path(img).stem().string();
    write_map_png(fs::path(out_dir) / (stem + ".png"), r.saliency);
    if (per_path) {
      const fs::path dir = fs::path(out_dir) / "paths";
      fs::create_directories(dir);
      const auto maps = post_processed_paths(r.paths, bundle.config.postprocess);
      for (int k = 0; k < kEnsembleMaps; ++k) write_map_png(dir / (stem + "." + kPathNames[k] + ".png"), maps[k]);
    }
    std::printf("%s\t%.4f s\n", img.c_str(), elapsed);
  }
  return 0;
}

int run_evaluate(const std::string& bundle_path, const std::string& manifest_path, const std::string& out_csv,
                 bool all_entries, const Common& common) {
  const ModelConfig cfg = common.load();
  const ModelBundle bundle = load_bundle(bundle_path);
  const DatasetManifest manifest = ingest_dataset(manifest_path);
  std::vector<const DatasetEntry*> entries;
  if (all_entries) {
    for (const auto& e : manifest.entries) entries.push_back(&e);
  } else {
    entries = evaluation_entries(manifest);
  }
  const EvaluationResult res = evaluate_bundle(bundle, manifest, entries, cfg.evaluation, false, cfg.jobs);
  const std::string csv = metric_csv(res.ensemble);
  if (out_csv.empty() || out_csv == "-") {
    std::cout << csv;
  } else {
    write_text_atomically(out_csv, csv);
    const MetricRow m = res.ensemble.means();
    std::printf("mean auc_j=%.4f s_auc=%.4f cc=%.4f sim=%.4f nss=%.4f over %zu images\n", m.auc_j, m.s_auc, m.cc,
                m.sim, m.nss, entries.size());
  }
  return 0;
}

Index parameter_count(const SaabKernelSet& k) { return k.dc_kernel.size() + k.ac_kernels.size() + k.patch_mean.size(); }

void print_summary(const ModelBundle& b, const std::string& path) {
  Index saab = 0;
  for (const auto& L : b.pipeline.layers) {
    saab += parameter_count(L.saab3) + parameter_count(L.saab5);
    if (L.spatial) saab += parameter_count(L.spatial->stage1) + parameter_count(L.spatial->stage2);
  }
  Index nodes = b.ensemble.model.node_count();
  for (const auto& h : b.heads.map) nodes += h.model.node_count();
  nodes += b.heads.residual16.model.node_count() + b.heads.residual8.model.node_count();
  std::printf("bundle: %s (%ju bytes)\n", path.c_str(), static_cast<std::uintmax_t>(fs::file_size(path)));
  std::printf("format_version: %u\n", b.format_version);
  std::printf("dataset: %s\nimages: %ju\nseed: %ju\ntimestamp: %jd\n", b.meta.dataset_name.c_str(),
              static_cast<std::uintmax_t>(b.meta.image_count), static_cast<std::uintmax_t>(b.meta.seed),
              static_cast<std::intmax_t>(b.meta.timestamp));
  std::printf("saab_parameters: %jd\ntree_nodes: %jd\n", static_cast<std::intmax_t>(saab),
              static_cast<std::intmax_t>(nodes));
}

int run_inspect(const std::string& bundle_path, bool shapes, bool curves, bool trees, const std::string& per_path,
                const Common& common) {
  const ModelBundle bundle = load_bundle(bundle_path);
  if (!shapes && !curves && !trees && per_path.empty()) print_summary(bundle, bundle_path);
  if (shapes) std::cout << describe_shapes(bundle.pipeline);
  if (curves) std::cout << rft_curves_csv(bundle);
  if (trees) {
    for (int s = 0; s < kSetCount; ++s) {
      std::cout << "# map." << level_name(set_level(s)) << "\n";
      dump_trees(std::cout, bundle.heads.map[s].model);
    }
    std::cout << "# residual.d16\n";
    dump_trees(std::cout, bundle.heads.residual16.model);
    std::cout << "# residual.d8\n";
    dump_trees(std::cout, bundle.heads.residual8.model);
    std::cout << "# ensemble\n";
    dump_trees(std::cout, bundle.ensemble.model);
  }
  if (!per_path.empty()) {
    const ModelConfig cfg = common.load();
    const DatasetManifest manifest = ingest_dataset(per_path);
    const EvaluationResult res =
        evaluate_bundle(bundle, manifest, evaluation_entries(manifest), cfg.evaluation, true, cfg.jobs);
    std::printf("path,auc_j,s_auc,cc,sim,nss\n");
    auto row = [](const char* name, const MetricRow& m) {
      std::printf("%s,%.6f,%.6f,%.6f,%.6f,%.6f\n", name, m.auc_j, m.s_auc, m.cc, m.sim, m.nss);
    };
    for (int k = 0; k < kEnsembleMaps; ++k) row(kPathNames[k], res.paths[k].means());
    row("ensemble", res.ensemble.means());
  }
  return 0;
}

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kData: return "data";
    case ErrorKind::kModel: return "model";
  }
  return "data";
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::kUsage: return 2;
    case ErrorKind::kData: return 3;
    case ErrorKind::kModel: return 4;
  }
  return 3;
}

int fail(const char* kind, int code, std::string msg) {
  for (char& ch : msg)
    if (ch == '\n') ch = ' ';
  std::fprintf(stderr, "error[%s]: %s\n", kind, msg.c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saliency prediction with successive subspace features and boosted trees"};
  app.require_subcommand(1);

  Common common;
  std::string manifest, bundle, out, per_path;
  std::vector<std::string> images;
  bool with_paths = false, shapes = false, curves = false, trees = false, all_entries = false;

  auto* train = app.add_subcommand("train", "Fit a model on a manifest's train split");
  train->add_option("manifest", manifest, "Dataset manifest")->required();
  train->add_option("bundle", out, "Output bundle path")->required();
  add_common(train, common);

  auto* predict = app.add_subcommand("predict", "Write saliency maps for images");
  predict->add_option("bundle", bundle, "Model bundle")->required();
  predict->add_option("images", images, "Input images")->required();
  predict->add_option("-o,--out-dir", out, "Output directory")->required();
  predict->add_flag("--per-path", with_paths, "Also write per-path maps under <out-dir>/paths");

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on a manifest");
  evaluate->add_option("bundle", bundle, "Model bundle")->required();
  evaluate->add_option("manifest", manifest, "Dataset manifest")->required();
  evaluate->add_option("-o,--out", out, "Output CSV (stdout when omitted)");
  evaluate->add_flag("--all", all_entries, "Score every entry instead of the test split");
  add_common(evaluate, common);

  auto* inspect = app.add_subcommand("inspect", "Describe a model bundle");
  inspect->add_option("bundle", bundle, "Model bundle")->required();
  inspect->add_flag("--shapes", shapes, "Per-stage channel and resolution table");
  inspect->add_flag("--rft-curves", curves, "Ranked RFT losses per stage as CSV");
  inspect->add_flag("--trees", trees, "Dump every regression tree");
  inspect->add_option("--per-path", per_path, "Per-path and ensemble metric means on a manifest");
  add_common(inspect, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", 2, e.what());
  }

  try {
    if (*train) return run_train(manifest, out, common);
    if (*predict) return run_predict(bundle, images, out, with_paths);
    if (*evaluate) return run_evaluate(bundle, manifest, out, all_entries, common);
    if (*inspect) return run_inspect(bundle, shapes, curves, trees, per_path, common);
  } catch (const Error& e) {
    return fail(kind_name(e.kind()), exit_code(e.kind()), e.what());
  } catch (const fs::filesystem_error& e) {
    return fail("data", 3, e.what());
  } catch (const std::bad_alloc&) {
    return fail("data", 3, "out of memory");
  } catch (const std::exception& e) {
    return fail("data", 3, e.what());
  }
  return 2;
}
