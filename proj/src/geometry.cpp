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

#include "seg2f/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace seg2f {

double signed_area(const Polygon& poly) {
  const std::size_t n = poly.ring.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly.ring[i];
    const Vec2& b = poly.ring[(i + 1) % n];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * twice;
}

double polygon_area(const Polygon& poly) { return std::fabs(signed_area(poly)); }

Vec2 polygon_centroid(const Polygon& poly) {
  const std::size_t n = poly.ring.size();
  double twice = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly.ring[i];
    const Vec2& b = poly.ring[(i + 1) % n];
    const double cross = a.x * b.y - b.x * a.y;
    twice += cross;
    cx += (a.x + b.x) * cross;
    cy += (a.y + b.y) * cross;
  }
  if (twice == 0.0) {
    // Degenerate ring: fall back to the vertex mean.
    Vec2 mean;
    for (const Vec2& v : poly.ring) {
      mean.x += v.x;
      mean.y += v.y;
    }
    mean.x /= static_cast<double>(n);
    mean.y /= static_cast<double>(n);
    return mean;
  }
  return {cx / (3.0 * twice), cy / (3.0 * twice)};
}

bool point_in_polygon(const Polygon& poly, double x, double y) {
  const std::size_t n = poly.ring.size();
  int crossings = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly.ring[i];
    const Vec2& b = poly.ring[(i + 1) % n];
    if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y)) {
      const double t = (y - a.y) / (b.y - a.y);
      const double cx = a.x + t * (b.x - a.x);
      if (cx > x) ++crossings;
    }
  }
  return (crossings & 1) != 0;
}

double mask_iou(const Raster& a, const Raster& b) {
  if (!a.same_shape(b))
    throw ValidationError("mask_iou: shape mismatch");
  std::size_t inter = 0, uni = 0;
  const double* pa = a.data();
  const double* pb = b.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool fa = pa[i] != 0.0;
    const bool fb = pb[i] != 0.0;
    inter += fa && fb;
    uni += fa || fb;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double polygon_iou(const Polygon& a, const Polygon& b, double resolution) {
  validate_polygon(a, "polygon_iou lhs");
  validate_polygon(b, "polygon_iou rhs");
  if (resolution <= 0.0)
    throw ValidationError("polygon_iou: resolution must be positive");

  const BBox ba = polygon_bbox(a);
  const BBox bb = polygon_bbox(b);
  if (!ba.intersects(bb)) return 0.0;

  const double min_x = std::min(ba.min_x, bb.min_x);
  const double min_y = std::min(ba.min_y, bb.min_y);
  const double max_x = std::max(ba.max_x, bb.max_x);
  const double max_y = std::max(ba.max_y, bb.max_y);

  const auto cells = [&](double lo, double hi) {
    const double span = (hi - lo) * resolution;
    return std::max<long long>(1, static_cast<long long>(std::ceil(span)));
  };
  const long long gw = cells(min_x, max_x);
  const long long gh = cells(min_y, max_y);
  if (gw * gh > (1LL << 26))
    throw ValidationError(
        "polygon_iou: resolution too fine for the polygons' extent");

  const auto scaled = [&](const Polygon& p) {
    Polygon out;
    out.ring.reserve(p.ring.size());
    for (const Vec2& v : p.ring)
      out.ring.push_back(
          {(v.x - min_x) * resolution, (v.y - min_y) * resolution});
    return out;
  };

  const int h = static_cast<int>(gh);
  const int w = static_cast<int>(gw);
  const Raster ra = rasterize_polygons({{scaled(a), 1}}, h, w);
  const Raster rb = rasterize_polygons({{scaled(b), 1}}, h, w);
  return mask_iou(ra, rb);
}

}  // namespace seg2f
