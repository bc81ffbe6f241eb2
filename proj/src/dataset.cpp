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

#include "fovea/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fovea/image_io.hpp"

namespace fovea {
namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

bool parse_split(const std::string& s, Split& out) {
  if (s == "train") out = Split::kTrain;
  else if (s == "val") out = Split::kVal;
  else if (s == "test") out = Split::kTest;
  else return false;
  return true;
}

bool parse_int(std::string_view s, Index& v) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

FixationMap DatasetEntry::working_fixations() const {
  return fixation_points.rescaled(Resolution{kInputHeight, kInputWidth});
}

std::vector<const DatasetEntry*> DatasetManifest::split(Split s) const {
  std::vector<const DatasetEntry*> out;
  for (const auto& e : entries)
    if (e.split == s) out.push_back(&e);
  return out;
}

std::string DatasetManifest::to_text() const {
  std::string out;
  for (const auto& e : entries) out += e.image + "\t" + e.gt + "\t" + e.fixations + "\t" + split_name(e.split) + "\n";
  return out;
}

FixationMap read_fixations(const std::filesystem::path& path, Resolution bounds) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot read fixation file " + path.string(), 0);
  FixationMap fm{bounds.rows, bounds.cols, {}};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    strip_cr(line);
    std::istringstream is(line);
    std::string xs, ys, extra;
    if (!(is >> xs)) continue;
    Index x = 0, y = 0;
    if (!(is >> ys) || (is >> extra) || !parse_int(xs, x) || !parse_int(ys, y))
      throw IngestError(path.string() + ": expected 'x y' integer pair", number);
    if (x < 0 || y < 0 || x >= bounds.cols || y >= bounds.rows)
      throw IngestError(path.string() + ": fixation (" + std::to_string(x) + ", " + std::to_string(y) +
                            ") out of bounds for " + std::to_string(bounds.cols) + "x" + std::to_string(bounds.rows),
                        number);
    fm.points.push_back({x, y});
  }
  return fm;
}

DatasetManifest ingest_dataset(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw IngestError("cannot read manifest " + manifest_path.string(), 0);
  DatasetManifest m;
  m.root = manifest_path.parent_path();
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) throw IngestError("expected 4 tab-separated fields, got " + std::to_string(fields.size()), number);
    DatasetEntry e;
    e.image = fields[0];
    e.gt = fields[1];
    e.fixations = fields[2];
    e.line = number;
    if (!parse_split(fields[3], e.split)) throw IngestError("unknown split '" + fields[3] + "'", number);
    for (const auto* rel : {&e.image, &e.gt, &e.fixations}) {
      if (rel->empty()) throw IngestError("empty path", number);
      if (!std::filesystem::is_regular_file(m.resolve(*rel))) throw IngestError("missing file " + *rel, number);
    }
    try {
      e.original = read_image_size(m.resolve(e.image));
      read_image_size(m.resolve(e.gt));
    } catch (const Error& err) {
      throw IngestError(err.what(), number);
    }
    e.fixation_points = read_fixations(m.resolve(e.fixations), e.original);
    m.entries.push_back(std::move(e));
  }
  if (m.entries.empty()) throw IngestError(manifest_path.string() + ": no entries", 0);
  return m;
}

}  // namespace fovea
