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

#include "fovea/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace fovea {
namespace {

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(v);
  while (std::getline(is, cur, ',')) out.push_back(trim(cur));
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text, bool keep_semantics = false) {
  const std::string s = trim(text);
  if (keep_semantics && s == "all") return T(0);
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(key + ": cannot parse '" + s + "'");
  return v;
}

template <typename T>
std::string format_number(T v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Entry {
  std::string key;
  std::function<void(ModelConfig&, const std::string&)> set;
  std::function<std::string(const ModelConfig&)> get;
};

template <typename T, typename Ref>
Entry scalar(std::string key, Ref ref, bool keep = false) {
  return {key,
          [key, ref, keep](ModelConfig& c, const std::string& v) { ref(c) = parse_number<T>(key, v, keep); },
          [ref](const ModelConfig& c) { return format_number<T>(ref(const_cast<ModelConfig&>(c))); }};
}

template <typename T, size_t N, typename Ref>
Entry list(std::string key, Ref ref, bool keep = false) {
  return {key,
          [key, ref, keep](ModelConfig& c, const std::string& v) {
            const auto parts = split_list(v);
            if (parts.size() != N)
              throw ConfigError(key + ": expected " + std::to_string(N) + " comma-separated values");
            std::array<T, N>& dst = ref(c);
            for (size_t i = 0; i < N; ++i) dst[i] = parse_number<T>(key, parts[i], keep);
          },
          [ref](const ModelConfig& c) {
            const std::array<T, N>& src = ref(const_cast<ModelConfig&>(c));
            std::string out;
            for (size_t i = 0; i < N; ++i) out += (i ? ", " : "") + format_number<T>(src[i]);
            return out;
          }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    using C = ModelConfig;
    std::vector<Entry> t;
    t.push_back(scalar<std::uint64_t>("seed", [](C& c) -> std::uint64_t& { return c.seed; }));
    t.push_back(scalar<int>("jobs", [](C& c) -> int& { return c.jobs; }));
    t.push_back(list<int, kLayerCount>("saab.keep3", [](C& c) -> auto& { return c.pipeline.saab3_keep; }, true));
    t.push_back(list<int, kLayerCount>("saab.keep5", [](C& c) -> auto& { return c.pipeline.saab5_keep; }, true));
    t.push_back(scalar<std::int64_t>("saab.patch_cap", [](C& c) -> auto& { return c.pipeline.saab_patch_cap; }));
    t.push_back(list<int, 3>("forward.keep", [](C& c) -> auto& { return c.pipeline.forward_keep; }, true));
    t.push_back(
        list<double, kLayerCount>("sampling.fraction", [](C& c) -> auto& { return c.pipeline.sample_fraction; }));
    t.push_back(scalar<int>("rft.bins", [](C& c) -> int& { return c.pipeline.rft_bins; }));
    t.push_back(scalar<int>("spatial.stage1_keep", [](C& c) -> int& { return c.pipeline.spatial.stage1_keep; }, true));
    t.push_back(scalar<int>("spatial.stage2_keep", [](C& c) -> int& { return c.pipeline.spatial.stage2_keep; }, true));
    t.push_back(scalar<std::int64_t>("spatial.patch_cap", [](C& c) -> auto& { return c.pipeline.spatial.patch_cap; }));
    t.push_back(scalar<double>("spatial.prior_sigma_fraction",
                               [](C& c) -> double& { return c.pipeline.spatial.prior_sigma_fraction; }));
    t.push_back(scalar<double>("canny.low", [](C& c) -> double& { return c.pipeline.spatial.edge.low_threshold; }));
    t.push_back(scalar<double>("canny.high", [](C& c) -> double& { return c.pipeline.spatial.edge.high_threshold; }));
    t.push_back(
        scalar<double>("canny.sigma", [](C& c) -> double& { return c.pipeline.spatial.edge.smoothing_sigma; }));
    t.push_back(list<int, kSetCount>("heads.keep", [](C& c) -> auto& { return c.prediction.head_keep; }, true));
    t.push_back(scalar<int>("gbt.tree_count", [](C& c) -> int& { return c.prediction.gbt.tree_count; }));
    t.push_back(scalar<int>("gbt.max_depth", [](C& c) -> int& { return c.prediction.gbt.max_depth; }));
    t.push_back(scalar<double>("gbt.learning_rate", [](C& c) -> double& { return c.prediction.gbt.learning_rate; }));
    t.push_back(scalar<double>("gbt.subsample", [](C& c) -> double& { return c.prediction.gbt.subsample; }));
    t.push_back(scalar<int>("gbt.min_samples_leaf", [](C& c) -> int& { return c.prediction.gbt.min_samples_leaf; }));
    t.push_back(scalar<int>("gbt.histogram_bins", [](C& c) -> int& { return c.prediction.gbt.histogram_bins; }));
    t.push_back(
        scalar<double>("postprocess.floor_quantile", [](C& c) -> double& { return c.postprocess.floor_quantile; }));
    t.push_back(scalar<int>("postprocess.blur_side", [](C& c) -> int& { return c.postprocess.blur_side; }));
    t.push_back(scalar<double>("postprocess.blur_sigma", [](C& c) -> double& { return c.postprocess.blur_sigma; }));
    t.push_back(
        scalar<int>("evaluation.shuffled_ratio", [](C& c) -> int& { return c.evaluation.shuffled_ratio; }));
    t.push_back(scalar<std::uint64_t>("evaluation.shuffled_seed",
                                      [](C& c) -> std::uint64_t& { return c.evaluation.shuffled_seed; }));
    return t;
  }();
  return table;
}

const Entry& find_entry(const std::string& key) {
  for (const auto& e : entries())
    if (e.key == key) return e;
  throw ConfigError("unknown config key '" + key + "'");
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

void ModelConfig::validate() const {
  require(jobs >= 1, "jobs must be >= 1");
  for (int k : pipeline.saab3_keep) require(k >= 0, "saab.keep3 entries must be >= 0");
  for (int k : pipeline.saab5_keep) require(k >= 0, "saab.keep5 entries must be >= 0");
  for (int k : pipeline.forward_keep) require(k >= 0, "forward.keep entries must be >= 0");
  for (int k : prediction.head_keep) require(k >= 0, "heads.keep entries must be >= 0");
  for (double f : pipeline.sample_fraction) require(f > 0.0 && f <= 1.0, "sampling.fraction entries must be in (0, 1]");
  require(pipeline.saab_patch_cap >= 1, "saab.patch_cap must be >= 1");
  require(pipeline.rft_bins >= 2, "rft.bins must be >= 2");
  const auto& sp = pipeline.spatial;
  require(sp.stage1_keep >= 0 && sp.stage2_keep >= 0, "spatial keeps must be >= 0");
  require(sp.patch_cap >= 1, "spatial.patch_cap must be >= 1");
  require(sp.prior_sigma_fraction > 0.0, "spatial.prior_sigma_fraction must be positive");
  require(sp.edge.low_threshold > 0.0 && sp.edge.low_threshold < sp.edge.high_threshold,
          "canny thresholds must satisfy 0 < low < high");
  require(sp.edge.smoothing_sigma > 0.0, "canny.sigma must be positive");
  require(evaluation.shuffled_ratio >= 1, "evaluation.shuffled_ratio must be >= 1");
  try {
    prediction.gbt.validate();
    postprocess.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : entries()) keys.push_back(e.key);
  return keys;
}

void set_config_value(ModelConfig& cfg, const std::string& key, const std::string& value) {
  find_entry(key).set(cfg, value);
}

std::string get_config_value(const ModelConfig& cfg, const std::string& key) { return find_entry(key).get(cfg); }

void apply_config_text(ModelConfig& cfg, const std::string& text, const std::string& origin) {
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = origin + ":" + std::to_string(number) + ": ";
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    try {
      set_config_value(cfg, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

std::string config_env_name(const std::string& key) {
  std::string name = "FOVEA_";
  for (char ch : key) name += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return name;
}

void apply_config_env(ModelConfig& cfg, const std::function<const char*(const char*)>& getenv_fn) {
  for (const auto& e : entries()) {
    const std::string name = config_env_name(e.key);
    const char* v = getenv_fn ? getenv_fn(name.c_str()) : std::getenv(name.c_str());
    if (!v) continue;
    try {
      e.set(cfg, v);
    } catch (const ConfigError& err) {
      throw ConfigError(name + ": " + err.what());
    }
  }
}

ModelConfig load_config(const std::string& path) {
  ModelConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    apply_config_text(cfg, ss.str(), path);
  }
  apply_config_env(cfg);
  cfg.validate();
  return cfg;
}

std::string config_to_text(const ModelConfig& cfg) {
  std::string out;
  for (const auto& e : entries()) out += e.key + " = " + e.get(cfg) + "\n";
  return out;
}

}  // namespace fovea
