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

#include "seg2f/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "seg2f/geometry.hpp"
#include "seg2f/kernels.hpp"

namespace seg2f {

const char* kind_name(RasterKind kind) {
  switch (kind) {
    case RasterKind::kConfidence: return "confidence";
    case RasterKind::kLabel: return "label";
    case RasterKind::kWeight: return "weight";
    case RasterKind::kInstanceId: return "instance_id";
    case RasterKind::kImageChannel: return "image_channel";
  }
  return "unknown";
}

Raster::Raster(RasterKind kind, int height, int width, double fill)
    : height_(height), width_(width), kind_(kind) {
  if (height < 1 || width < 1)
    throw ValidationError("raster dimensions must be positive");
  values_.assign(static_cast<std::size_t>(height) *
                     static_cast<std::size_t>(width),
                 fill);
}

BBox polygon_bbox(const Polygon& poly) {
  BBox box;
  box.min_x = box.min_y = std::numeric_limits<double>::infinity();
  box.max_x = box.max_y = -std::numeric_limits<double>::infinity();
  for (const Vec2& v : poly.ring) {
    box.min_x = std::min(box.min_x, v.x);
    box.min_y = std::min(box.min_y, v.y);
    box.max_x = std::max(box.max_x, v.x);
    box.max_y = std::max(box.max_y, v.y);
  }
  return box;
}

void validate_polygon(const Polygon& poly, const std::string& where) {
  const std::size_t n = poly.ring.size();
  if (n < 3)
    throw ValidationError(where + ": polygon needs at least 3 vertices");
  for (const Vec2& v : poly.ring)
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
      throw ValidationError(where + ": polygon has a non-finite vertex");
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly.ring[i];
    const Vec2& b = poly.ring[(i + 1) % n];
    if (a.x == b.x && a.y == b.y)
      throw ValidationError(where + ": consecutive duplicate vertices");
  }
  if (polygon_area(poly) == 0.0)
    throw ValidationError(where + ": polygon has zero area");
}

namespace {

// Paints pixels whose centers the ring covers (even-odd rule, half-open
// spans) by calling visit(row, col) for each covered pixel.
template <typename Visit>
void scan_polygon(const Polygon& poly, int height, int width, Visit visit) {
  const BBox box = polygon_bbox(poly);
  int y_lo = static_cast<int>(std::floor(box.min_y - 0.5));
  int y_hi = static_cast<int>(std::ceil(box.max_y + 0.5));
  y_lo = std::max(y_lo, 0);
  y_hi = std::min(y_hi, height - 1);
  const std::size_t n = poly.ring.size();
  std::vector<double> crossings;
  for (int row = y_lo; row <= y_hi; ++row) {
    const double cy = row + 0.5;
    crossings.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = poly.ring[i];
      const Vec2& b = poly.ring[(i + 1) % n];
      if ((a.y <= cy && cy < b.y) || (b.y <= cy && cy < a.y)) {
        const double t = (cy - a.y) / (b.y - a.y);
        crossings.push_back(a.x + t * (b.x - a.x));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
      const double xl = crossings[k];
      const double xr = crossings[k + 1];
      int c_lo = static_cast<int>(std::ceil(xl - 0.5));
      int c_hi = static_cast<int>(std::ceil(xr - 0.5));  // exclusive
      c_lo = std::max(c_lo, 0);
      c_hi = std::min(c_hi, width);
      for (int col = c_lo; col < c_hi; ++col) visit(row, col);
    }
  }
}

void validate_classed(const std::vector<ClassedPolygon>& polys) {
  for (std::size_t k = 0; k < polys.size(); ++k) {
    validate_polygon(polys[k].poly, "polygon " + std::to_string(k));
    if (polys[k].cls != 1 && polys[k].cls != 2)
      throw ValidationError("polygon " + std::to_string(k) +
                            ": class must be 1 (building) or 2 (dense)");
  }
}

}  // namespace

Raster rasterize_polygons(const std::vector<ClassedPolygon>& polys, int height,
                          int width) {
  validate_classed(polys);
  Raster labels(RasterKind::kLabel, height, width, 0.0);
  for (const ClassedPolygon& cp : polys) {
    const double cls = static_cast<double>(cp.cls);
    scan_polygon(cp.poly, height, width,
                 [&](int row, int col) { labels.at(row, col) = cls; });
  }
  return labels;
}

LabeledInstances rasterize_instances(const std::vector<ClassedPolygon>& polys,
                                     int height, int width) {
  validate_classed(polys);
  LabeledInstances out{Raster(RasterKind::kLabel, height, width, 0.0),
                       Raster(RasterKind::kInstanceId, height, width, 0.0)};
  for (std::size_t k = 0; k < polys.size(); ++k) {
    const double cls = static_cast<double>(polys[k].cls);
    const double id = static_cast<double>(k + 1);
    scan_polygon(polys[k].poly, height, width, [&](int row, int col) {
      out.labels.at(row, col) = cls;
      out.instances.at(row, col) = id;
    });
  }
  return out;
}

Raster resize_bilinear(const Raster& raster, int out_height, int out_width) {
  if (raster.kind() != RasterKind::kConfidence &&
      raster.kind() != RasterKind::kImageChannel)
    throw ValidationError(
        std::string("cannot bilinearly resize a ") + kind_name(raster.kind()) +
        " raster; labels, weights and instance ids are not interpolable");
  if (out_height < 1 || out_width < 1)
    throw ValidationError("resize target dimensions must be positive");

  const int in_h = raster.height();
  const int in_w = raster.width();
  if (out_height == in_h && out_width == in_w) return raster;

  // Source coordinate for an output sample, half-pixel-center aligned.
  const auto src_coord = [](int dst, int in_size, int out_size) {
    double s = (dst + 0.5) * (static_cast<double>(in_size) /
                              static_cast<double>(out_size)) -
               0.5;
    return std::min(std::max(s, 0.0), static_cast<double>(in_size - 1));
  };

  // Horizontal pass.
  Raster tmp(raster.kind(), in_h, out_width, 0.0);
  std::vector<int> x0(out_width), x1(out_width);
  std::vector<double> fx(out_width);
  for (int x = 0; x < out_width; ++x) {
    const double s = src_coord(x, in_w, out_width);
    x0[x] = static_cast<int>(std::floor(s));
    x1[x] = std::min(x0[x] + 1, in_w - 1);
    fx[x] = s - x0[x];
  }
  for (int y = 0; y < in_h; ++y) {
    const double* row = raster.data() + raster.index(y, 0);
    double* trow = tmp.data() + tmp.index(y, 0);
    for (int x = 0; x < out_width; ++x)
      trow[x] = (1.0 - fx[x]) * row[x0[x]] + fx[x] * row[x1[x]];
  }

  // Vertical pass.
  Raster out(raster.kind(), out_height, out_width, 0.0);
  const auto& k = kernels::ops();
  for (int y = 0; y < out_height; ++y) {
    const double s = src_coord(y, in_h, out_height);
    const int y0 = static_cast<int>(std::floor(s));
    const int y1 = std::min(y0 + 1, in_h - 1);
    const double f = s - y0;
    k.blend(tmp.data() + tmp.index(y0, 0), tmp.data() + tmp.index(y1, 0),
            static_cast<std::size_t>(out_width), 1.0 - f, f,
            out.data() + out.index(y, 0));
  }

  // Interpolation is convex, so pin the result into the input's range to
  // keep that exact in floating point as well.
  double lo = raster.data()[0], hi = raster.data()[0];
  for (const double v : raster.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  k.clamp(out.data(), out.size(), lo, hi, out.data());
  return out;
}

}  // namespace seg2f
