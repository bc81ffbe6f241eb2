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

#ifndef FOVEA_TESTS_TEST_UTIL_HPP_
#define FOVEA_TESTS_TEST_UTIL_HPP_

#include <filesystem>
#include <string>

#include "fovea/random.hpp"
#include "fovea/tensor.hpp"

namespace fovea::testing {

inline Tensor random_tensor(Index h, Index w, Index c, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Rng rng(seed);
  Tensor t(h, w, c);
  for (Index i = 0; i < t.matrix().size(); ++i) t.matrix().data()[i] = lo + (hi - lo) * uniform01(rng);
  return t;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fovea_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fovea::testing

#endif  // FOVEA_TESTS_TEST_UTIL_HPP_
