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

#ifndef SEG2F_CELLS_HPP_
#define SEG2F_CELLS_HPP_

#include <array>
#include <cstdint>
#include <string>

#include "seg2f/raster.hpp"

namespace seg2f {

// Quadtree cells on the unit sphere via the inscribed cube: each face
// carries a 2^level x 2^level grid in a warped (s, t) parameterization.
// The warp (the quadratic s <-> u transform below) compensates the
// gnomonic projection's area distortion; without it same-level cells
// would differ in area by more than a factor of five, with it the spread
// stays near two. Cells serialize as "face/level/i/j" tokens.
struct CellId {
  int face = 0;       // 0..5: +x, +y, +z, -x, -y, -z
  int level = 0;      // 0..20
  std::uint32_t i = 0;  // 0 .. 2^level - 1, along s
  std::uint32_t j = 0;  // 0 .. 2^level - 1, along t

  bool operator==(const CellId&) const = default;
  bool operator<(const CellId& o) const {
    if (face != o.face) return face < o.face;
    if (level != o.level) return level < o.level;
    if (i != o.i) return i < o.i;
    return j < o.j;
  }
};

// Quadratic warp between cell-space s in [0, 1] and cube-face u in [-1, 1].
double st_to_uv(double s);
double uv_to_st(double u);

// Cell containing the given point (degrees; lat in [-90, 90], lon in
// [-180, 180]).
CellId cell_of(double lat_deg, double lon_deg, int level);

// Cube-face rectangle covered by a cell.
struct CellBounds {
  int face = 0;
  double u_lo = 0.0, u_hi = 0.0;
  double v_lo = 0.0, v_hi = 0.0;
};
CellBounds cell_bounds(const CellId& id);

// Cell corners as unit vectors in counter-clockwise order (as seen from
// outside the sphere): (u_lo,v_lo), (u_hi,v_lo), (u_hi,v_hi), (u_lo,v_hi).
std::array<std::array<double, 3>, 4> cell_corners(const CellId& id);

// Exact solid angle of the cell in steradians (closed form for the solid
// angle subtended by a cube-face rectangle).
double cell_area(const CellId& id);

// The corners as a lat/lon quad (x = longitude, y = latitude, degrees),
// same corner order as cell_corners. Edges are straight only in face
// coordinates; the quad is for map rendering, not exact containment.
Polygon cell_quad(const CellId& id);

// "face/level/i/j", e.g. "0/4/8/8".
std::string cell_token(const CellId& id);
// Parses and validates a token; throws ValidationError on malformed input.
CellId parse_cell_token(const std::string& token);

}  // namespace seg2f

#endif  // SEG2F_CELLS_HPP_
