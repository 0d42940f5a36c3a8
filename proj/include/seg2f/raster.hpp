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

#ifndef SEG2F_RASTER_HPP_
#define SEG2F_RASTER_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "seg2f/errors.hpp"

namespace seg2f {

// What the pixel values of a raster mean. Integer-valued kinds (label,
// instance_id) store exact small integers in the double payload.
enum class RasterKind : std::uint8_t {
  kConfidence,    // per-pixel scores in [0, 1]
  kLabel,         // 0 = background, 1 = building, 2 = dense
  kWeight,        // nonnegative per-pixel loss weights
  kInstanceId,    // 0 = background, 1..K = instance index
  kImageChannel,  // one channel of imagery, values in [0, 1]
};

const char* kind_name(RasterKind kind);

// Row-major 2-D grid of doubles. Every per-pixel payload in the pipeline
// (confidence masks, labels, weights, instance ids, image channels) uses
// this one container; `kind` selects the interpretation and which
// operations accept the raster.
class Raster {
 public:
  Raster() = default;
  Raster(RasterKind kind, int height, int width, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  RasterKind kind() const { return kind_; }
  void set_kind(RasterKind kind) { kind_ = kind; }

  std::size_t size() const { return values_.size(); }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double at(int y, int x) const { return values_[index(y, x)]; }
  double& at(int y, int x) { return values_[index(y, x)]; }
  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  bool in_bounds(int y, int x) const {
    return y >= 0 && y < height_ && x >= 0 && x < width_;
  }
  bool same_shape(const Raster& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

 private:
  int height_ = 0;
  int width_ = 0;
  RasterKind kind_ = RasterKind::kConfidence;
  std::vector<double> values_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Simple polygon as an open ring (first vertex is not repeated).
// Vertices live in raster coordinates: x right, y down, the pixel (r, c)
// spans [c, c+1) x [r, r+1) and has its center at (c + 0.5, r + 0.5).
struct Polygon {
  std::vector<Vec2> ring;
};

struct BBox {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  bool intersects(const BBox& o) const {
    return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y &&
           o.min_y <= max_y;
  }
};

BBox polygon_bbox(const Polygon& poly);

// Throws ValidationError unless the ring has >= 3 vertices, no consecutive
// duplicates (including the wrap-around pair), and nonzero area.
void validate_polygon(const Polygon& poly, const std::string& where);

// One polygon plus the class it paints.
struct ClassedPolygon {
  Polygon poly;
  int cls = 1;  // 1 = building, 2 = dense
};

// Paints polygons onto a label raster by pixel-center coverage: a pixel
// gets the class of the last polygon in list order that covers its center
// (even-odd rule). Degenerate polygons are reported with their index.
Raster rasterize_polygons(const std::vector<ClassedPolygon>& polys, int height,
                          int width);

// Same painting rule, but also emits which polygon covered each pixel
// (instance ids are 1-based list positions; later polygons win).
struct LabeledInstances {
  Raster labels;     // RasterKind::kLabel
  Raster instances;  // RasterKind::kInstanceId
};
LabeledInstances rasterize_instances(const std::vector<ClassedPolygon>& polys,
                                     int height, int width);

// Bilinear resample with half-pixel-center alignment:
//   src = (dst + 0.5) * (in_size / out_size) - 0.5,
// source coordinates clamped to the valid range at the borders. Accepts
// confidence and image-channel rasters; labels, weights and instance ids
// must never be bilinearly resized and are rejected. When the output shape
// equals the input shape the values are copied bit-for-bit; otherwise the
// output is clamped to the input's [min, max] range.
Raster resize_bilinear(const Raster& raster, int out_height, int out_width);

}  // namespace seg2f

#endif  // SEG2F_RASTER_HPP_
