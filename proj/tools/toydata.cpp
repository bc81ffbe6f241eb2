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

#include "toydata.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "fovea/atomic_file.hpp"
#include "fovea/random.hpp"

namespace fovea::toy {
namespace {

struct Object {
  double cx, cy, radius;
  bool disc;
  double rgb[3];
  double weight;
};

double normal(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng), u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

bool inside(const Object& o, double x, double y) {
  const double dx = x - o.cx, dy = y - o.cy;
  return o.disc ? dx * dx + dy * dy <= o.radius * o.radius : std::abs(dx) <= o.radius && std::abs(dy) <= 0.7 * o.radius;
}

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

}  // namespace

ToyImage make_toy_image(const ToyConfig& cfg, int index) {
  Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(index)}));
  const int H = cfg.height, W = cfg.width;

  double base[3], grad[3];
  for (int c = 0; c < 3; ++c) {
    base[c] = uniform(rng, 0.35, 0.65);
    grad[c] = uniform(rng, -0.08, 0.08);
  }
  std::vector<Object> objects(1 + uniform_index(rng, 3));
  const double diag = std::hypot(H, W);
  for (auto& o : objects) {
    o.radius = uniform(rng, 0.05, 0.14) * std::min(H, W) * 1.4;
    o.cx = uniform(rng, o.radius, W - o.radius);
    o.cy = uniform(rng, o.radius, H - o.radius);
    o.disc = uniform01(rng) < 0.5;
    double contrast = 0.0;
    do {
      contrast = 0.0;
      for (int c = 0; c < 3; ++c) {
        o.rgb[c] = uniform01(rng) < 0.5 ? uniform(rng, 0.0, 0.1) : uniform(rng, 0.9, 1.0);
        contrast += std::abs(o.rgb[c] - base[c]);
      }
    } while (contrast < 0.9);
    const double d = std::hypot(o.cx - 0.5 * W, o.cy - 0.5 * H) / diag;
    o.weight = contrast * std::sqrt(o.radius) * std::exp(-d * d / (2.0 * 0.3 * 0.3));
  }

  ToyImage out;
  out.image = Raster{H, W, 3, std::vector<std::uint8_t>(static_cast<size_t>(H) * W * 3)};
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      const Object* top = nullptr;
      for (const auto& o : objects)
        if (inside(o, x, y)) top = &o;
      for (int c = 0; c < 3; ++c) {
        double v = top ? top->rgb[c] : base[c] + grad[c] * (double(x) / W - 0.5) + 0.03 * (uniform01(rng) - 0.5);
        out.image.pixels[(static_cast<size_t>(y) * W + x) * 3 + c] = to_byte(v);
      }
    }
  }

  double total = 0.0;
  for (const auto& o : objects) total += o.weight;
  out.fixations = FixationMap{H, W, {}};
  for (int f = 0; f < cfg.fixations; ++f) {
    double x, y;
    if (uniform01(rng) < cfg.center_share) {
      x = 0.5 * W + 0.18 * W * normal(rng);
      y = 0.5 * H + 0.18 * H * normal(rng);
    } else {
      double pick = uniform01(rng) * total;
      const Object* o = &objects.back();
      for (const auto& cand : objects) {
        if (pick < cand.weight) {
          o = &cand;
          break;
        }
        pick -= cand.weight;
      }
      x = o->cx + 0.45 * o->radius * normal(rng);
      y = o->cy + 0.45 * o->radius * normal(rng);
    }
    out.fixations.points.push_back({std::clamp<Index>(std::lround(x), 0, W - 1), std::clamp<Index>(std::lround(y), 0, H - 1)});
  }

  Tensor density(H, W, 1);
  for (const auto& p : out.fixations.points) density(p.y, p.x) += 1.0;
  const double sigma = cfg.gt_sigma_fraction * W;
  const int side = 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
  density = gaussian_blur(density, side, sigma);
  const double peak = density.matrix().maxCoeff();
  out.gt = Raster{H, W, 1, std::vector<std::uint8_t>(static_cast<size_t>(H) * W)};
  for (Index i = 0; i < density.pixels(); ++i)
    out.gt.pixels[static_cast<size_t>(i)] = to_byte(peak > 0 ? density.matrix()(i, 0) / peak : 0.0);
  return out;
}

std::filesystem::path write_toy_dataset(const std::filesystem::path& dir, const ToyConfig& cfg) {
  namespace fs = std::filesystem;
  for (const char* sub : {"images", "gt", "fixations"}) fs::create_directories(dir / sub);
  std::string manifest = "# synthetic saliency dataset\n";
  const int n = cfg.train + cfg.test;
  for (int i = 0; i < n; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "toy_%03d", i);
    const ToyImage t = make_toy_image(cfg, i);
    const std::string img = std::string("images/") + stem + ".png";
    const std::string gt = std::string("gt/") + stem + ".png";
    const std::string fix = std::string("fixations/") + stem + ".txt";
    write_png(dir / img, t.image);
    write_png(dir / gt, t.gt);
    std::string pts;
    for (const auto& p : t.fixations.points) pts += std::to_string(p.x) + " " + std::to_string(p.y) + "\n";
    write_text_atomically(dir / fix, pts);
    manifest += img + "\t" + gt + "\t" + fix + "\t" + (i < cfg.train ? "train" : "test") + "\n";
  }
  const fs::path path = dir / "manifest.tsv";
  write_text_atomically(path, manifest);
  return path;
}

}  // namespace fovea::toy
