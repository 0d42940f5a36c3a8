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

#include "seg2f/cells.hpp"

#include <charconv>
#include <cmath>

#include "seg2f/errors.hpp"

namespace seg2f {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxLevel = 20;

void validate_cell(const CellId& id) {
  if (id.face < 0 || id.face > 5)
    throw ValidationError("cell face must be in 0..5");
  if (id.level < 0 || id.level > kMaxLevel)
    throw ValidationError("cell level must be in 0..20");
  const std::uint32_t n = 1u << id.level;
  if (id.i >= n || id.j >= n)
    throw ValidationError("cell i/j out of range for level " +
                          std::to_string(id.level));
}

struct FaceUv {
  int face = 0;
  double u = 0.0;
  double v = 0.0;
};

FaceUv face_uv_from_xyz(double x, double y, double z) {
  const double ax = std::fabs(x), ay = std::fabs(y), az = std::fabs(z);
  FaceUv r;
  if (ax >= ay && ax >= az)
    r.face = x >= 0.0 ? 0 : 3;
  else if (ay >= az)
    r.face = y >= 0.0 ? 1 : 4;
  else
    r.face = z >= 0.0 ? 2 : 5;
  switch (r.face) {
    case 0: r.u = y / x; r.v = z / x; break;
    case 1: r.u = -x / y; r.v = z / y; break;
    case 2: r.u = -x / z; r.v = -y / z; break;
    case 3: r.u = z / x; r.v = y / x; break;
    case 4: r.u = z / y; r.v = -x / y; break;
    default: r.u = -y / z; r.v = -x / z; break;
  }
  return r;
}

std::array<double, 3> xyz_from_face_uv(int face, double u, double v) {
  switch (face) {
    case 0: return {1.0, u, v};
    case 1: return {-u, 1.0, v};
    case 2: return {-u, -v, 1.0};
    case 3: return {-1.0, -v, -u};
    case 4: return {v, -1.0, -u};
    default: return {v, u, -1.0};
  }
}

// Solid angle of [0,u] x [0,v] seen from the sphere center through the
// face plane at distance 1 (odd in both arguments).
double corner_solid_angle(double u, double v) {
  return std::atan(u * v / std::sqrt(1.0 + u * u + v * v));
}

}  // namespace

double st_to_uv(double s) {
  if (s >= 0.5) return (1.0 / 3.0) * (4.0 * s * s - 1.0);
  return (1.0 / 3.0) * (1.0 - 4.0 * (1.0 - s) * (1.0 - s));
}

double uv_to_st(double u) {
  if (u >= 0.0) return 0.5 * std::sqrt(1.0 + 3.0 * u);
  return 1.0 - 0.5 * std::sqrt(1.0 - 3.0 * u);
}

CellId cell_of(double lat_deg, double lon_deg, int level) {
  if (!(lat_deg >= -90.0 && lat_deg <= 90.0))
    throw ValidationError("latitude must be in [-90, 90]");
  if (!(lon_deg >= -180.0 && lon_deg <= 180.0))
    throw ValidationError("longitude must be in [-180, 180]");
  if (level < 0 || level > kMaxLevel)
    throw ValidationError("cell level must be in 0..20");

  const double lat = lat_deg * (kPi / 180.0);
  const double lon = lon_deg * (kPi / 180.0);
  const double x = std::cos(lat) * std::cos(lon);
  const double y = std::cos(lat) * std::sin(lon);
  const double z = std::sin(lat);

  const FaceUv f = face_uv_from_xyz(x, y, z);
  const double s = uv_to_st(f.u);
  const double t = uv_to_st(f.v);

  const std::uint32_t n = 1u << level;
  const auto grid = [n](double c) {
    const double scaled = std::floor(c * static_cast<double>(n));
    if (scaled < 0.0) return std::uint32_t{0};
    if (scaled >= static_cast<double>(n)) return n - 1;
    return static_cast<std::uint32_t>(scaled);
  };
  CellId id;
  id.face = f.face;
  id.level = level;
  id.i = grid(s);
  id.j = grid(t);
  return id;
}

CellBounds cell_bounds(const CellId& id) {
  validate_cell(id);
  const double n = static_cast<double>(1u << id.level);
  CellBounds b;
  b.face = id.face;
  b.u_lo = st_to_uv(static_cast<double>(id.i) / n);
  b.u_hi = st_to_uv(static_cast<double>(id.i + 1) / n);
  b.v_lo = st_to_uv(static_cast<double>(id.j) / n);
  b.v_hi = st_to_uv(static_cast<double>(id.j + 1) / n);
  return b;
}

std::array<std::array<double, 3>, 4> cell_corners(const CellId& id) {
  const CellBounds b = cell_bounds(id);
  const std::array<std::array<double, 2>, 4> uv = {{
      {b.u_lo, b.v_lo}, {b.u_hi, b.v_lo}, {b.u_hi, b.v_hi}, {b.u_lo, b.v_hi}}};
  std::array<std::array<double, 3>, 4> out;
  for (int k = 0; k < 4; ++k) {
    std::array<double, 3> p = xyz_from_face_uv(b.face, uv[k][0], uv[k][1]);
    const double norm =
        std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    out[k] = {p[0] / norm, p[1] / norm, p[2] / norm};
  }
  return out;
}

double cell_area(const CellId& id) {
  const CellBounds b = cell_bounds(id);
  return corner_solid_angle(b.u_hi, b.v_hi) -
         corner_solid_angle(b.u_lo, b.v_hi) -
         corner_solid_angle(b.u_hi, b.v_lo) +
         corner_solid_angle(b.u_lo, b.v_lo);
}

Polygon cell_quad(const CellId& id) {
  const auto corners = cell_corners(id);
  Polygon quad;
  quad.ring.reserve(4);
  for (const auto& p : corners) {
    Vec2 v;
    v.x = std::atan2(p[1], p[0]) * (180.0 / kPi);
    v.y = std::atan2(p[2], std::hypot(p[0], p[1])) * (180.0 / kPi);
    quad.ring.push_back(v);
  }
  return quad;
}

std::string cell_token(const CellId& id) {
  validate_cell(id);
  return std::to_string(id.face) + "/" + std::to_string(id.level) + "/" +
         std::to_string(id.i) + "/" + std::to_string(id.j);
}

CellId parse_cell_token(const std::string& token) {
  const auto bad = [&token]() {
    return ValidationError("malformed cell token '" + token + "'");
  };
  std::array<std::uint64_t, 4> parts{};
  const char* p = token.data();
  const char* end = token.data() + token.size();
  for (int k = 0; k < 4; ++k) {
    if (k > 0) {
      if (p >= end || *p != '/') throw bad();
      ++p;
    }
    const auto [next, ec] = std::from_chars(p, end, parts[k]);
    if (ec != std::errc() || next == p) throw bad();
    p = next;
  }
  if (p != end) throw bad();
  if (parts[0] > 5 || parts[1] > kMaxLevel) throw bad();
  CellId id;
  id.face = static_cast<int>(parts[0]);
  id.level = static_cast<int>(parts[1]);
  const std::uint64_t n = std::uint64_t{1} << id.level;
  if (parts[2] >= n || parts[3] >= n) throw bad();
  id.i = static_cast<std::uint32_t>(parts[2]);
  id.j = static_cast<std::uint32_t>(parts[3]);
  return id;
}

}  // namespace seg2f
