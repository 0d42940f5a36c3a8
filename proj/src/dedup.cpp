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

#include "seg2f/dedup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "seg2f/errors.hpp"
#include "seg2f/geometry.hpp"

namespace seg2f {

std::vector<std::string> AssetCoverage::covering(double x, double y) const {
  std::vector<std::string> out;
  for (const auto& [asset, poly] : footprints)
    if (point_in_polygon(poly, x, y)) out.push_back(asset);
  return out;
}

namespace {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<std::vector<int>> group_detections(
    const std::vector<Detection>& detections, double iou_thr,
    double resolution) {
  if (!(iou_thr > 0.0 && iou_thr <= 1.0))
    throw ValidationError("iou threshold must be in (0, 1]");
  const int n = static_cast<int>(detections.size());
  if (n == 0) return {};

  std::vector<BBox> boxes(n);
  std::vector<double> diags(n);
  for (int i = 0; i < n; ++i) {
    boxes[i] = polygon_bbox(detections[i].poly);
    diags[i] = std::hypot(boxes[i].max_x - boxes[i].min_x,
                          boxes[i].max_y - boxes[i].min_y);
  }
  std::vector<double> sorted_diags = diags;
  std::nth_element(sorted_diags.begin(),
                   sorted_diags.begin() + (n - 1) / 2, sorted_diags.end());
  double cell = 2.0 * sorted_diags[(n - 1) / 2];
  if (!(cell > 0.0)) cell = 1.0;

  // Every detection is registered in each grid cell its box touches, so
  // any intersecting pair shares at least one cell.
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<int>> grid;
  const auto cell_index = [cell](double v) {
    return static_cast<std::int64_t>(std::floor(v / cell));
  };
  for (int i = 0; i < n; ++i) {
    const std::int64_t x0 = cell_index(boxes[i].min_x);
    const std::int64_t x1 = cell_index(boxes[i].max_x);
    const std::int64_t y0 = cell_index(boxes[i].min_y);
    const std::int64_t y1 = cell_index(boxes[i].max_y);
    for (std::int64_t cy = y0; cy <= y1; ++cy)
      for (std::int64_t cx = x0; cx <= x1; ++cx)
        grid[{cy, cx}].push_back(i);
  }

  UnionFind uf(n);
  std::set<std::pair<int, int>> seen;
  for (const auto& [key, members] : grid) {
    (void)key;
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const int i = members[a];
        const int j = members[b];
        if (!boxes[i].intersects(boxes[j])) continue;
        if (!seen.insert({std::min(i, j), std::max(i, j)}).second) continue;
        if (uf.find(i) == uf.find(j)) continue;
        if (polygon_iou(detections[i].poly, detections[j].poly, resolution) >=
            iou_thr)
          uf.unite(i, j);
      }
    }
  }

  std::map<int, std::vector<int>> by_root;
  for (int i = 0; i < n; ++i) by_root[uf.find(i)].push_back(i);
  std::vector<std::vector<int>> groups;
  groups.reserve(by_root.size());
  for (auto& [root, members] : by_root) {
    (void)root;
    groups.push_back(std::move(members));
  }
  return groups;
}

std::vector<Detection> deduplicate(const std::vector<Detection>& detections,
                                   const AssetCoverage& coverage,
                                   const DedupParams& params) {
  if (!(params.agree_conf >= 0.0 && params.agree_conf <= 1.0))
    throw ValidationError("agree_conf must be in [0, 1]");
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const std::string& asset = detections[i].asset_id;
    if (coverage.quality.find(asset) == coverage.quality.end())
      throw ValidationError("detection " + std::to_string(i) +
                            " references unknown asset '" + asset + "'");
  }

  const auto groups =
      group_detections(detections, params.iou_thr, params.resolution);

  std::vector<Detection> kept;
  kept.reserve(groups.size());
  for (const std::vector<int>& group : groups) {
    int best = group[0];
    double best_key =
        detections[best].score * coverage.quality.at(detections[best].asset_id);
    double best_area = polygon_area(detections[best].poly);
    for (std::size_t k = 1; k < group.size(); ++k) {
      const int cand = group[k];
      const double key =
          detections[cand].score * coverage.quality.at(detections[cand].asset_id);
      const double area = polygon_area(detections[cand].poly);
      if (key > best_key || (key == best_key && area > best_area)) {
        best = cand;
        best_key = key;
        best_area = area;
      }
    }

    const Detection& winner = detections[best];
    const Vec2 centroid = polygon_centroid(winner.poly);
    if (winner.score < params.agree_conf &&
        coverage.covering(centroid.x, centroid.y).size() >= 2)
      continue;  // overlapping imagery failed to confirm a weak detection
    kept.push_back(winner);
  }
  return kept;
}

}  // namespace seg2f
