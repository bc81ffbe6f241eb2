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

// fovea-toydata: writes the synthetic dataset and its manifest.

#include <cstdio>

#include "CLI11.hpp"
#include "toydata.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic saliency dataset"};
  fovea::toy::ToyConfig cfg;
  std::string out;
  app.add_option("out", out, "Output directory")->required();
  app.add_option("--train", cfg.train, "Training images")->check(CLI::NonNegativeNumber);
  app.add_option("--test", cfg.test, "Test images")->check(CLI::NonNegativeNumber);
  app.add_option("--height", cfg.height, "Image height")->check(CLI::PositiveNumber);
  app.add_option("--width", cfg.width, "Image width")->check(CLI::PositiveNumber);
  app.add_option("--fixations", cfg.fixations, "Fixations per image")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Generator seed");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error[usage]: %s\n", e.what());
    return 2;
  }
  try {
    const auto manifest = fovea::toy::write_toy_dataset(out, cfg);
    std::printf("%s\n", manifest.string().c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error[data]: %s\n", e.what());
    return 3;
  }
  return 0;
}
