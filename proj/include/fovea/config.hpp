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

// Line-oriented `key = value` configuration.
//
// Every tunable has a key; `# ...` starts a comment. Lists are comma
// separated, and `all` stands for 0 in keep counts. An environment variable
// FOVEA_<KEY> (upper case, dots as underscores) overrides the file.

#ifndef FOVEA_CONFIG_HPP_
#define FOVEA_CONFIG_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fovea/metrics.hpp"
#include "fovea/pipeline.hpp"
#include "fovea/prediction.hpp"

namespace fovea {

struct EvaluationConfig {
  int shuffled_ratio = kShuffledNegativeRatio;
  std::uint64_t shuffled_seed = kShuffledDefaultSeed;
};

struct ModelConfig {
  PipelineConfig pipeline;
  PredictionConfig prediction;
  PostProcessConfig postprocess;
  EvaluationConfig evaluation;
  std::uint64_t seed = 0;
  int jobs = 1;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Every key, in canonical order.
std::vector<std::string> config_keys();

/// Sets one key from its textual value; throws ConfigError.
void set_config_value(ModelConfig& cfg, const std::string& key, const std::string& value);

std::string get_config_value(const ModelConfig& cfg, const std::string& key);

/// Applies the lines of `text` on top of `cfg`.
void apply_config_text(ModelConfig& cfg, const std::string& text, const std::string& origin = "config");

/// Applies FOVEA_* variables; `getenv` is injectable for tests.
void apply_config_env(ModelConfig& cfg, const std::function<const char*(const char*)>& getenv_fn = {});

/// Defaults, then the file (if non-empty path), then the environment.
ModelConfig load_config(const std::string& path);

/// Canonical text listing every key; parses back to the same config.
std::string config_to_text(const ModelConfig& cfg);

/// Name of the environment variable for `key`.
std::string config_env_name(const std::string& key);

}  // namespace fovea

#endif  // FOVEA_CONFIG_HPP_
