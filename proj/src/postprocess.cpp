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

#include "seg2f/postprocess.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "detail.hpp"
#include "seg2f/geometry.hpp"
#include "seg2f/kernels.hpp"

namespace seg2f {
namespace {

void require_confidence(const Raster& r, const char* what) {
  if (r.kind() != RasterKind::kConfidence)
    throw ValidationError(std::string(what) + " expects a confidence raster");
}

}  // namespace

Raster threshold(const Raster& conf, double t) {
  require_confidence(conf, "threshold");
  if (!std::isfinite(t))
    throw ValidationError("threshold value must be finite");
  Raster out(RasterKind::kLabel, conf.height(), conf.width(), 0.0);
  kernels::ops().threshold_ge(conf.data(), conf.size(), t, out.data());
  return out;
}

InstanceMap connected_components(const Raster& mask) {
  for (const double v : mask.values())
    if (v != 0.0 && v != 1.0)
      throw ValidationError("connected_components expects a binary mask");
  int count = 0;
  InstanceMap out;
  out.ids = detail::label_components(mask, false, &count);
  out.scores.assign(static_cast<std::size_t>(count), 0.0);
  return out;
}

InstanceMap score_instances(InstanceMap instances, const Raster& conf) {
  require_confidence(conf, "score_instances");
  if (!instances.ids.same_shape(conf))
    throw ValidationError("score_instances: shape mismatch");
  std::vector<double> sums(instances.scores.size(), 0.0);
  std::vector<std::size_t> areas(instances.scores.size(), 0);
  for (std::size_t i = 0; i < conf.size(); ++i) {
    const int id = static_cast<int>(instances.ids.data()[i]);
    if (id == 0) continue;
    if (id < 0 || static_cast<std::size_t>(id) > sums.size())
      throw ValidationError("score_instances: instance id out of range");
    sums[id - 1] += conf.data()[i];
    ++areas[id - 1];
  }
  for (std::size_t k = 0; k < sums.size(); ++k)
    instances.scores[k] = areas[k] == 0 ? 0.0 : sums[k] / static_cast<double>(areas[k]);
  return instances;
}

InstanceMap dilate_instances(const InstanceMap& instances) {
  const Raster& ids = instances.ids;
  InstanceMap out{Raster(ids.kind(), ids.height(), ids.width(), 0.0),
                  instances.scores};
  for (int y = 0; y < ids.height(); ++y) {
    for (int x = 0; x < ids.width(); ++x) {
      const double own = ids.at(y, x);
      if (own != 0.0) {
        out.ids.at(y, x) = own;
        continue;
      }
      // Contested growth pixels go to the strongest neighbor instance;
      // equal scores resolve toward the smaller id.
      int best = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (!ids.in_bounds(y + dy, x + dx)) continue;
          const int cand = static_cast<int>(ids.at(y + dy, x + dx));
          if (cand == 0) continue;
          if (best == 0) {
            best = cand;
          } else if (instances.scores[cand - 1] > instances.scores[best - 1] ||
                     (instances.scores[cand - 1] ==
                          instances.scores[best - 1] &&
                      cand < best)) {
            best = cand;
          }
        }
      }
      out.ids.at(y, x) = static_cast<double>(best);
    }
  }
  return out;
}

Raster average_masks(const std::vector<Raster>& masks, int target_h,
                     int target_w) {
  if (masks.empty())
    throw ValidationError("average_masks needs at least one mask");

  std::vector<Raster> resized;
  resized.reserve(masks.size());
  for (const Raster& m : masks) {
    require_confidence(m, "average_masks");
    resized.push_back(resize_bilinear(m, target_h, target_w));
  }

  // Canonical accumulation order (sorted by content) makes the average
  // independent of the order the masks arrive in, exactly, not just up to
  // rounding.
  std::vector<std::size_t> order(resized.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(
        resized[a].values().begin(), resized[a].values().end(),
        resized[b].values().begin(), resized[b].values().end());
  });

  const std::size_t n = resized[0].size();
  Raster acc(RasterKind::kConfidence, target_h, target_w, 0.0);
  std::vector<double> lo(n, std::numeric_limits<double>::infinity());
  std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
  const auto& k = kernels::ops();
  for (const std::size_t idx : order) {
    k.blend(acc.data(), resized[idx].data(), n, 1.0, 1.0, acc.data());
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = std::min(lo[i], resized[idx].data()[i]);
      hi[i] = std::max(hi[i], resized[idx].data()[i]);
    }
  }
  k.affine(acc.data(), n, 1.0 / static_cast<double>(masks.size()), 0.0,
           acc.data());
  for (std::size_t i = 0; i < n; ++i)
    acc.data()[i] = std::min(std::max(acc.data()[i], lo[i]), hi[i]);
  return acc;
}

namespace {

struct LocalGrid {
  int h = 0, w = 0;       // cells
  int oy = 0, ox = 0;     // global offset of cell (0, 0)
  std::vector<std::uint8_t> fg;

  bool at(int y, int x) const {
    if (y < 0 || y >= h || x < 0 || x >= w) return false;
    return fg[static_cast<std::size_t>(y) * w + x] != 0;
  }
  std::uint8_t& cell(int y, int x) {
    return fg[static_cast<std::size_t>(y) * w + x];
  }
};

// Flood the background from the grid border (8-connected) and fill
// whatever it cannot reach: those are interior holes.
void fill_holes(LocalGrid& g) {
  std::vector<std::uint8_t> outside(g.fg.size(), 0);
  std::vector<std::pair<int, int>> stack;
  const auto push = [&](int y, int x) {
    if (y < 0 || y >= g.h || x < 0 || x >= g.w) return;
    const std::size_t i = static_cast<std::size_t>(y) * g.w + x;
    if (outside[i] || g.fg[i]) return;
    outside[i] = 1;
    stack.push_back({y, x});
  };
  for (int x = 0; x < g.w; ++x) {
    push(0, x);
    push(g.h - 1, x);
  }
  for (int y = 0; y < g.h; ++y) {
    push(y, 0);
    push(y, g.w - 1);
  }
  while (!stack.empty()) {
    const auto [y, x] = stack.back();
    stack.pop_back();
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) push(y + dy, x + dx);
  }
  for (std::size_t i = 0; i < g.fg.size(); ++i)
    if (!g.fg[i] && !outside[i]) g.fg[i] = 1;
}

// Walks the outer boundary along pixel cracks, keeping foreground on the
// right of the travel direction, and returns the corner vertices in local
// corner coordinates. Directions: 0 = +x, 1 = +y, 2 = -x, 3 = -y.
std::vector<Vec2> trace_boundary(const LocalGrid& g) {
  int sy = -1, sx = -1;
  for (int y = 0; y < g.h && sy < 0; ++y)
    for (int x = 0; x < g.w; ++x)
      if (g.at(y, x)) {
        sy = y;
        sx = x;
        break;
      }
  if (sy < 0) return {};

  static constexpr int kDy[4] = {0, 1, 0, -1};
  static constexpr int kDx[4] = {1, 0, -1, 0};
  // Cells right and left of an edge leaving vertex (Y, X) in direction d.
  const auto valid = [&](int vy, int vx, int d) {
    int ry, rx, ly, lx;
    switch (d) {
      case 0: ry = vy; rx = vx; ly = vy - 1; lx = vx; break;
      case 1: ry = vy; rx = vx - 1; ly = vy; lx = vx; break;
      case 2: ry = vy - 1; rx = vx - 1; ly = vy; lx = vx - 1; break;
      default: ry = vy - 1; rx = vx; ly = vy - 1; lx = vx - 1; break;
    }
    return g.at(ry, rx) && !g.at(ly, lx);
  };

  std::vector<Vec2> ring;
  int vy = sy, vx = sx, d = 0;
  for (;;) {
    vy += kDy[d];
    vx += kDx[d];
    // Hug the wall: right turn first, then straight, then left, then back.
    int nd = d;
    for (const int turn : {1, 0, 3, 2}) {
      const int cand = (d + turn) & 3;
      if (valid(vy, vx, cand)) {
        nd = cand;
        break;
      }
    }
    if (nd != d)
      ring.push_back({static_cast<double>(vx), static_cast<double>(vy)});
    if (vy == sy && vx == sx && nd == 0) break;
    d = nd;
  }
  return ring;
}

double line_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const double bax = b.x - a.x;
  const double bay = b.y - a.y;
  const double cross = bax * (p.y - a.y) - bay * (p.x - a.x);
  const double len = std::sqrt(bax * bax + bay * bay);
  return len == 0.0 ? std::hypot(p.x - a.x, p.y - a.y)
                    : std::fabs(cross) / len;
}

void dp_mark(const std::vector<Vec2>& pts, std::size_t i, std::size_t j,
             double tau, std::vector<char>* keep) {
  if (j <= i + 1) return;
  double dmax = -1.0;
  std::size_t split = i;
  for (std::size_t k = i + 1; k < j; ++k) {
    const double dist = line_distance(pts[i], pts[j], pts[k]);
    if (dist > dmax) {
      dmax = dist;
      split = k;
    }
  }
  if (dmax > tau) {
    (*keep)[split] = 1;
    dp_mark(pts, i, split, tau, keep);
    dp_mark(pts, split, j, tau, keep);
  }
}

std::vector<Vec2> simplify_ring(const std::vector<Vec2>& ring, double tau) {
  if (tau <= 0.0 || ring.size() <= 4) return ring;

  // Anchor at vertex 0 and the vertex farthest from it, then run the
  // recursive split on both halves of the closed ring.
  std::size_t far = 1;
  double best = -1.0;
  for (std::size_t k = 1; k < ring.size(); ++k) {
    const double d = std::hypot(ring[k].x - ring[0].x, ring[k].y - ring[0].y);
    if (d > best) {
      best = d;
      far = k;
    }
  }
  std::vector<Vec2> pts = ring;
  pts.push_back(ring[0]);
  std::vector<char> keep(pts.size(), 0);
  keep[0] = keep[far] = keep[pts.size() - 1] = 1;
  dp_mark(pts, 0, far, tau, &keep);
  dp_mark(pts, far, pts.size() - 1, tau, &keep);

  std::vector<Vec2> out;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    if (keep[k]) out.push_back(pts[k]);
  if (out.size() < 3) return ring;
  return out;
}

}  // namespace

std::vector<Detection> vectorize(const InstanceMap& instances,
                                 const VectorizeParams& params) {
  if (params.simplify_tolerance < 0.0)
    throw ValidationError("vectorize: tolerance must be nonnegative");
  const Raster& ids = instances.ids;

  std::vector<Detection> out;
  const int n_inst = static_cast<int>(instances.scores.size());
  for (int id = 1; id <= n_inst; ++id) {
    int min_y = ids.height(), max_y = -1, min_x = ids.width(), max_x = -1;
    for (int y = 0; y < ids.height(); ++y)
      for (int x = 0; x < ids.width(); ++x)
        if (static_cast<int>(ids.at(y, x)) == id) {
          min_y = std::min(min_y, y);
          max_y = std::max(max_y, y);
          min_x = std::min(min_x, x);
          max_x = std::max(max_x, x);
        }
    if (max_y < 0) continue;

    LocalGrid g;
    g.h = max_y - min_y + 3;
    g.w = max_x - min_x + 3;
    g.oy = min_y - 1;
    g.ox = min_x - 1;
    g.fg.assign(static_cast<std::size_t>(g.h) * g.w, 0);
    for (int y = min_y; y <= max_y; ++y)
      for (int x = min_x; x <= max_x; ++x)
        if (static_cast<int>(ids.at(y, x)) == id)
          g.cell(y - min_y + 1, x - min_x + 1) = 1;
    fill_holes(g);

    std::vector<Vec2> ring = trace_boundary(g);
    if (ring.size() < 3) continue;
    for (Vec2& v : ring) {
      v.x += g.ox;
      v.y += g.oy;
    }
    // Counter-clockwise in the (x, y) plane.
    Polygon poly{std::move(ring)};
    if (signed_area(poly) < 0.0)
      std::reverse(poly.ring.begin(), poly.ring.end());
    poly.ring = simplify_ring(poly.ring, params.simplify_tolerance);

    Detection det;
    det.poly = std::move(poly);
    det.score = instances.scores[id - 1];
    out.push_back(std::move(det));
  }
  return out;
}

std::vector<Detection> min_area_filter(std::vector<Detection> detections,
                                       double min_pixels) {
  if (min_pixels < 0.0)
    throw ValidationError("min_area_filter: min_pixels must be nonnegative");
  std::vector<Detection> out;
  out.reserve(detections.size());
  for (Detection& det : detections)
    if (polygon_area(det.poly) >= min_pixels) out.push_back(std::move(det));
  return out;
}

}  // namespace seg2f
