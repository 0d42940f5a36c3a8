// Copyright 2026 The seg2f Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seg2f/synth.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "seg2f/errors.hpp"
#include "seg2f/label_prep.hpp"
#include "seg2f/rng.hpp"

namespace seg2f {
namespace {

struct Rect {
  int r0 = 0, c0 = 0, h = 0, w = 0;  // pixel rows r0..r0+h-1, cols c0..c0+w-1
  int cls = 1;
};

Polygon rect_polygon(const Rect& r) {
  Polygon poly;
  poly.ring = {{static_cast<double>(r.c0), static_cast<double>(r.r0)},
               {static_cast<double>(r.c0 + r.w), static_cast<double>(r.r0)},
               {static_cast<double>(r.c0 + r.w), static_cast<double>(r.r0 + r.h)},
               {static_cast<double>(r.c0), static_cast<double>(r.r0 + r.h)}};
  return poly;
}

void validate(const SceneParams& p) {
  if (p.size < 16) throw ValidationError("scene size must be at least 16");
  if (p.min_buildings < 0 || p.max_buildings < p.min_buildings)
    throw ValidationError("building count range is invalid");
  if (p.min_side < 6)
    throw ValidationError("buildings must be at least 6 pixels on a side");
  if (p.max_side < p.min_side || p.max_side > p.size - 2)
    throw ValidationError("building side range is invalid for this size");
  if (!(p.dense_prob >= 0.0 && p.dense_prob <= 1.0))
    throw ValidationError("dense_prob must be in [0, 1]");
  if (!(p.noise >= 0.0 && p.noise < 0.5))
    throw ValidationError("noise must be in [0, 0.5)");
}

}  // namespace

Scene generate_scene(const SceneParams& params) {
  validate(params);
  Rng rng(params.seed);

  const int size = params.size;
  const int n_target =
      params.min_buildings +
      static_cast<int>(rng.bounded(static_cast<std::uint64_t>(
          params.max_buildings - params.min_buildings + 1)));

  std::vector<char> occupied(static_cast<std::size_t>(size) * size, 0);
  const auto body_free = [&](int r0, int c0, int h, int w) {
    // The 1-pixel halo around the body must also be clear, which keeps
    // distinct placements at least one background pixel apart.
    for (int y = r0 - 1; y <= r0 + h; ++y)
      for (int x = c0 - 1; x <= c0 + w; ++x)
        if (occupied[static_cast<std::size_t>(y) * size + x]) return false;
    return true;
  };
  const auto claim = [&](const Rect& r) {
    for (int y = r.r0; y < r.r0 + r.h; ++y)
      for (int x = r.c0; x < r.c0 + r.w; ++x)
        occupied[static_cast<std::size_t>(y) * size + x] = 1;
  };

  const auto draw_side = [&]() {
    return params.min_side +
           static_cast<int>(rng.bounded(static_cast<std::uint64_t>(
               params.max_side - params.min_side + 1)));
  };

  std::vector<Rect> rects;  // one entry per instance, placement order
  constexpr int kTriesPerBuilding = 200;
  for (int b = 0; b < n_target; ++b) {
    bool placed = false;
    for (int attempt = 0; attempt < kTriesPerBuilding && !placed; ++attempt) {
      const bool dense = rng.next_double() < params.dense_prob;
      if (!dense) {
        const int h = draw_side();
        const int w = draw_side();
        const int r0 = 1 + static_cast<int>(rng.bounded(
                               static_cast<std::uint64_t>(size - h - 1)));
        const int c0 = 1 + static_cast<int>(rng.bounded(
                               static_cast<std::uint64_t>(size - w - 1)));
        if (!body_free(r0, c0, h, w)) continue;
        Rect r{r0, c0, h, w, 1};
        claim(r);
        rects.push_back(r);
        placed = true;
        continue;
      }

      // A dense placement is two rectangles sharing a full edge.
      const bool side_by_side = rng.bounded(2) == 0;
      const int h = draw_side();
      const int w1 = draw_side();
      const int w2 = draw_side();
      const int total_w = side_by_side ? w1 + w2 : w1;
      const int total_h = side_by_side ? h : h + w2;
      if (total_h > size - 2 || total_w > size - 2) continue;
      const int r0 = 1 + static_cast<int>(rng.bounded(
                             static_cast<std::uint64_t>(size - total_h - 1)));
      const int c0 = 1 + static_cast<int>(rng.bounded(
                             static_cast<std::uint64_t>(size - total_w - 1)));
      if (!body_free(r0, c0, total_h, total_w)) continue;
      Rect a, b2;
      if (side_by_side) {
        a = {r0, c0, h, w1, 2};
        b2 = {r0, c0 + w1, h, w2, 2};
      } else {
        // Stacked pair: same width so the shared edge spans both rects;
        // the second draw becomes the lower rect's height.
        a = {r0, c0, h, w1, 2};
        b2 = {r0 + h, c0, w2, w1, 2};
      }
      claim(a);
      claim(b2);
      rects.push_back(a);
      rects.push_back(b2);
      placed = true;
    }
    if (!placed)
      throw ValidationError("could not place building " + std::to_string(b) +
                            " after " + std::to_string(kTriesPerBuilding) +
                            " attempts; relax the size or count ranges");
  }

  Scene scene;
  scene.labels = Raster(RasterKind::kLabel, size, size, 0.0);
  Raster instances(RasterKind::kInstanceId, size, size, 0.0);
  for (std::size_t k = 0; k < rects.size(); ++k) {
    const Rect& r = rects[k];
    for (int y = r.r0; y < r.r0 + r.h; ++y)
      for (int x = r.c0; x < r.c0 + r.w; ++x) {
        scene.labels.at(y, x) = static_cast<double>(r.cls);
        instances.at(y, x) = static_cast<double>(k + 1);
      }
    GroundTruth gt;
    gt.poly = rect_polygon(r);
    gt.dense = r.cls == 2;
    scene.truths.push_back(std::move(gt));
  }

  const Raster eroded = erode_instances(scene.labels, instances);
  scene.confidence = Raster(RasterKind::kConfidence, size, size, 0.0);
  for (std::size_t i = 0; i < eroded.size(); ++i)
    scene.confidence.data()[i] = eroded.data()[i] != 0.0 ? 1.0 : 0.0;
  if (params.noise > 0.0) {
    for (double& v : scene.confidence.values()) {
      v += rng.uniform(-params.noise, params.noise);
      v = std::min(1.0, std::max(0.0, v));
    }
  }

  // Flat synthetic imagery: one tone per class and channel.
  static constexpr double kTone[3][3] = {
      // background, building, dense
      {0.15, 0.80, 0.60},
      {0.20, 0.75, 0.55},
      {0.25, 0.70, 0.50},
  };
  for (int ch = 0; ch < 3; ++ch) {
    Raster channel(RasterKind::kImageChannel, size, size, 0.0);
    for (std::size_t i = 0; i < channel.size(); ++i)
      channel.data()[i] =
          kTone[ch][static_cast<int>(scene.labels.data()[i])];
    scene.image.push_back(std::move(channel));
  }
  return scene;
}

}  // namespace seg2f
