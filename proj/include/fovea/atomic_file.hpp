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

#ifndef FOVEA_ATOMIC_FILE_HPP_
#define FOVEA_ATOMIC_FILE_HPP_

#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "fovea/errors.hpp"

namespace fovea {

/// Calls write(tmp) for a sibling temporary path, then renames it over
/// `path`. On failure the temporary is removed and `path` is untouched.
template <typename WriteFn>
void write_file_atomically(const std::filesystem::path& path, WriteFn&& write) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp";
  try {
    write(tmp);
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

inline void write_text_atomically(const std::filesystem::path& path, const std::string& text) {
  write_file_atomically(path, [&](const std::filesystem::path& tmp) {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorKind::kData, "cannot write " + tmp.string());
  });
}

}  // namespace fovea

#endif  // FOVEA_ATOMIC_FILE_HPP_
