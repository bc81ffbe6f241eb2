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

// Single-file model bundle.
//
// Layout, all integers little-endian:
//
//   "FOVEABND"                       8 bytes
//   u32 format version
//   u32 section count
//   section table: {u32 name length, name, u64 offset, u64 length, u32 crc32}
//   u32 crc32 of every preceding byte
//   section payloads
//
// Doubles are stored as their IEEE-754 bit patterns, so a loaded bundle
// predicts exactly like the one that was saved.

#ifndef FOVEA_BUNDLE_HPP_
#define FOVEA_BUNDLE_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fovea/model.hpp"

namespace fovea {

inline constexpr char kBundleMagic[8] = {'F', 'O', 'V', 'E', 'A', 'B', 'N', 'D'};

struct BundleSectionInfo {
  std::string name;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  std::uint32_t crc = 0;
};

std::string encode_bundle(const ModelBundle& bundle);
ModelBundle decode_bundle(std::string_view bytes);

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

/// Section table of an encoded bundle (validates the header only).
std::vector<BundleSectionInfo> bundle_sections(std::string_view bytes);

std::string encode_gbt(const GbtModel& model);
GbtModel decode_gbt(std::string_view bytes);

}  // namespace fovea

#endif  // FOVEA_BUNDLE_HPP_
