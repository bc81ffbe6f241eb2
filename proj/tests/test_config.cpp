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

#include <fstream>
#include <map>

#include "fovea/config.hpp"
#include "test_util.hpp"

namespace fovea {
namespace {

TEST(Config, DefaultsAreDocumentedValues) {
  const ModelConfig c;
  EXPECT_EQ(get_config_value(c, "forward.keep"), "20, 50, 100");
  EXPECT_EQ(get_config_value(c, "gbt.tree_count"), "300");
  EXPECT_EQ(get_config_value(c, "gbt.max_depth"), "6");
  EXPECT_EQ(get_config_value(c, "gbt.subsample"), "0.8");
  EXPECT_EQ(get_config_value(c, "gbt.histogram_bins"), "64");
  EXPECT_EQ(get_config_value(c, "gbt.min_samples_leaf"), "20");
  EXPECT_EQ(get_config_value(c, "rft.bins"), "16");
  EXPECT_EQ(get_config_value(c, "postprocess.floor_quantile"), "0.5");
  EXPECT_EQ(get_config_value(c, "evaluation.shuffled_ratio"), "10");
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, TextRoundTripCoversEveryKey) {
  ModelConfig c;
  apply_config_text(c, "seed = 42\nsaab.keep3 = all, 10, 12, 14, 16  # trailing comment\n"
                       "gbt.learning_rate = 0.05\npostprocess.blur_sigma=3.25\n");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.pipeline.saab3_keep[0], 0);
  EXPECT_EQ(c.pipeline.saab3_keep[4], 16);
  EXPECT_DOUBLE_EQ(c.prediction.gbt.learning_rate, 0.05);
  const std::string text = config_to_text(c);
  for (const auto& key : config_keys()) EXPECT_NE(text.find(key + " = "), std::string::npos) << key;
  ModelConfig back;
  apply_config_text(back, text);
  EXPECT_EQ(config_to_text(back), text);
  EXPECT_EQ(back.postprocess.blur_sigma, 3.25);
}

TEST(Config, UnknownKeyAndBadValuesCarryTheLine) {
  ModelConfig c;
  try {
    apply_config_text(c, "seed = 1\n\n# note\nsaab.kep3 = 4\n", "my.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("my.cfg:4:"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("saab.kep3"), std::string::npos);
  }
  EXPECT_THROW(apply_config_text(c, "gbt.tree_count = ten\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "forward.keep = 1,2\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "just words\n"), ConfigError);
  ModelConfig bad;
  bad.postprocess.floor_quantile = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = ModelConfig{};
  bad.pipeline.spatial.edge.low_threshold = 0.5;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Config, EnvironmentOverridesFile) {
  EXPECT_EQ(config_env_name("gbt.tree_count"), "FOVEA_GBT_TREE_COUNT");
  const std::map<std::string, std::string> env = {{"FOVEA_GBT_TREE_COUNT", "12"}, {"FOVEA_HEADS_KEEP", "all,1,2,3"}};
  ModelConfig c;
  c.prediction.gbt.tree_count = 99;
  apply_config_env(c, [&](const char* name) -> const char* {
    const auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  EXPECT_EQ(c.prediction.gbt.tree_count, 12);
  EXPECT_EQ(c.prediction.head_keep[0], 0);
  EXPECT_EQ(c.prediction.head_keep[3], 3);
}

TEST(Config, LoadFileThenValidate) {
  const auto dir = testing::scratch_dir("config_load");
  std::ofstream(dir / "a.cfg") << "jobs = 3\npostprocess.floor_quantile = 0.25\n";
  const ModelConfig c = load_config((dir / "a.cfg").string());
  EXPECT_EQ(c.jobs, 3);
  EXPECT_EQ(c.postprocess.floor_quantile, 0.25);
  std::ofstream(dir / "b.cfg") << "jobs = 0\n";
  EXPECT_THROW(load_config((dir / "b.cfg").string()), ConfigError);
  EXPECT_THROW(load_config((dir / "missing.cfg").string()), Error);
  EXPECT_NO_THROW(load_config(""));
}

}  // namespace
}  // namespace fovea
