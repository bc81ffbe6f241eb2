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

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "fovea/bundle.hpp"
#include "test_util.hpp"
#include "toy_fixture.hpp"

namespace fovea {
namespace {

namespace fs = std::filesystem;
using testing::tiny_bundle;

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put_u32(std::string& b, size_t pos, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[pos + i] = static_cast<char>((v >> (8 * i)) & 0xFF);
}

TEST(Bundle, SaveLoadSaveIsByteIdentical) {
  const fs::path dir = testing::scratch_dir("bundle_rt");
  save_bundle(tiny_bundle(), dir / "a.fovea");
  const ModelBundle loaded = load_bundle(dir / "a.fovea");
  save_bundle(loaded, dir / "b.fovea");
  EXPECT_EQ(read_bytes(dir / "a.fovea"), read_bytes(dir / "b.fovea"));
  EXPECT_EQ(read_bytes(dir / "a.fovea"), encode_bundle(tiny_bundle()));
  EXPECT_FALSE(fs::exists(dir / "a.fovea.tmp"));
  EXPECT_EQ(loaded.meta.dataset_name, "tiny");
  EXPECT_EQ(loaded.meta.image_count, 4u);
  EXPECT_EQ(loaded.meta.seed, 3u);
  EXPECT_EQ(config_to_text(loaded.config), config_to_text(tiny_bundle().config));
}

TEST(Bundle, LoadedModelPredictsBitExactly) {
  const ModelBundle loaded = decode_bundle(encode_bundle(tiny_bundle()));
  const auto imgs = testing::toy_training_images(1, 31);
  const PredictionResult a = predict_image(tiny_bundle(), imgs[0].image);
  const PredictionResult b = predict_image(loaded, imgs[0].image);
  ASSERT_EQ(a.saliency.matrix().size(), b.saliency.matrix().size());
  EXPECT_EQ(std::memcmp(a.saliency.matrix().data(), b.saliency.matrix().data(),
                        sizeof(double) * a.saliency.matrix().size()),
            0);
  EXPECT_EQ(std::memcmp(a.fused.matrix().data(), b.fused.matrix().data(), sizeof(double) * a.fused.matrix().size()), 0);
}

TEST(Bundle, SectionTableLayout) {
  const std::string bytes = encode_bundle(tiny_bundle());
  EXPECT_EQ(bytes.substr(0, 8), "FOVEABND");
  const auto sections = bundle_sections(bytes);
  const char* names[] = {"config", "meta", "pipeline", "heads", "ensemble"};
  ASSERT_EQ(sections.size(), 5u);
  std::uint64_t end = sections[0].offset;
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(sections[i].name, names[i]);
    EXPECT_EQ(sections[i].offset, end);
    end += sections[i].length;
  }
  EXPECT_EQ(end, bytes.size());
}

TEST(Bundle, FlippedPayloadByteNamesTheSection) {
  const std::string bytes = encode_bundle(tiny_bundle());
  for (const auto& s : bundle_sections(bytes)) {
    std::string bad = bytes;
    bad[s.offset + s.length / 2] ^= 0x40;
    try {
      decode_bundle(bad);
      ADD_FAILURE() << s.name;
    } catch (const BundleChecksumError& e) {
      EXPECT_EQ(e.section(), s.name);
      EXPECT_NE(std::string(e.what()).find(s.name), std::string::npos);
    }
  }
  std::string bad = bytes;
  bad[20] ^= 0x01;  // inside the first section name
  try {
    decode_bundle(bad);
    ADD_FAILURE();
  } catch (const BundleChecksumError& e) {
    EXPECT_EQ(e.section(), "header");
  }
}

TEST(Bundle, VersionSkewTruncationAndMagic) {
  const std::string bytes = encode_bundle(tiny_bundle());
  std::string newer = bytes;
  put_u32(newer, 8, kBundleVersion + 1);
  EXPECT_THROW(decode_bundle(newer), BundleVersionError);
  std::string zero = bytes;
  put_u32(zero, 8, 0);
  EXPECT_THROW(decode_bundle(zero), BundleFormatError);
  std::string magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(decode_bundle(magic), BundleFormatError);
  for (size_t cut : {size_t(0), size_t(10), size_t(40), bytes.size() / 2, bytes.size() - 1})
    EXPECT_THROW(decode_bundle(std::string_view(bytes).substr(0, cut)), BundleTruncatedError) << cut;
  EXPECT_THROW(load_bundle("/nonexistent/model.fovea"), BundleError);
}

TEST(Bundle, RefusesUnfittedModels) {
  const fs::path dir = testing::scratch_dir("bundle_unfitted");
  EXPECT_THROW(save_bundle(ModelBundle{}, dir / "x.fovea"), InvalidState);
  EXPECT_FALSE(fs::exists(dir / "x.fovea"));
}

TEST(Bundle, TrainingIsIndependentOfJobsAndStampsSourceDateEpoch) {
  const auto data = testing::toy_training_images(3, 7);
  ModelConfig cfg = testing::tiny_config();
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const ModelBundle a = train_model(data, cfg, "jobs");
  cfg.jobs = 3;
  const ModelBundle b = train_model(data, cfg, "jobs");
  ::unsetenv("SOURCE_DATE_EPOCH");
  EXPECT_EQ(a.meta.timestamp, 1700000000);
  EXPECT_EQ(encode_bundle(a), encode_bundle(b));
  EXPECT_EQ(decode_bundle(encode_bundle(b)).config.jobs, 1);
  cfg.seed = 4;
  EXPECT_NE(encode_bundle(train_model(data, cfg, "jobs")), encode_bundle(a));
}

}  // namespace
}  // namespace fovea
