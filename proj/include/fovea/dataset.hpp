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

// Dataset manifests.
//
// One entry per line, tab separated, paths relative to the manifest:
//
//   image<TAB>ground_truth<TAB>fixations<TAB>split
//
// Blank lines and lines starting with '#' are skipped. The split is one of
// train, val, test. Fixation files hold one `x y` integer pair per line in
// the original image's pixel coordinates.

#ifndef FOVEA_DATASET_HPP_
#define FOVEA_DATASET_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "fovea/metrics.hpp"

namespace fovea {

enum class Split { kTrain, kVal, kTest };

const char* split_name(Split s);

struct DatasetEntry {
  std::string image;      // as written in the manifest
  std::string gt;
  std::string fixations;
  Split split = Split::kTrain;
  int line = 0;           // manifest line number
  Resolution original;    // image size on disk
  FixationMap fixation_points;  // original coordinates

  /// Fixations rescaled to the 480x640 working resolution.
  FixationMap working_fixations() const;
};

struct DatasetManifest {
  std::filesystem::path root;  // directory of the manifest
  std::vector<DatasetEntry> entries;

  std::filesystem::path resolve(const std::string& rel) const { return root / rel; }
  std::vector<const DatasetEntry*> split(Split s) const;
  /// Canonical manifest text.
  std::string to_text() const;
};

/// Parses and validates a manifest: every file exists and decodes its
/// header, every fixation lies inside the original image.
DatasetManifest ingest_dataset(const std::filesystem::path& manifest_path);

/// Reads a fixation file; `bounds` is the original image resolution.
FixationMap read_fixations(const std::filesystem::path& path, Resolution bounds);

}  // namespace fovea

#endif  // FOVEA_DATASET_HPP_
