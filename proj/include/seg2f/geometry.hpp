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

#ifndef SEG2F_GEOMETRY_HPP_
#define SEG2F_GEOMETRY_HPP_

#include "seg2f/raster.hpp"

namespace seg2f {

// Shoelace area, sign following vertex order.
double signed_area(const Polygon& poly);
// Absolute shoelace area.
double polygon_area(const Polygon& poly);

Vec2 polygon_centroid(const Polygon& poly);

// Even-odd rule with a half-open edge convention, so shared edges never
// double-count a point.
bool point_in_polygon(const Polygon& poly, double x, double y);

// Intersection-over-union of two binary masks. Nonzero pixels count as
// foreground. Two empty masks have IoU 1.0 by convention.
double mask_iou(const Raster& a, const Raster& b);

// Polygon IoU by rasterizing both rings onto a grid over their joint
// bounding box at `resolution` pixels per coordinate unit. Degenerate
// (zero-area) inputs are rejected.
double polygon_iou(const Polygon& a, const Polygon& b,
                   double resolution = 4.0);

}  // namespace seg2f

#endif  // SEG2F_GEOMETRY_HPP_
