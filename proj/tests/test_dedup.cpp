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

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "seg2f/dedup.hpp"
#include "seg2f/geometry.hpp"
#include "seg2f/rng.hpp"

namespace {

using seg2f::AssetCoverage;
using seg2f::DedupParams;
using seg2f::Detection;
using seg2f::Polygon;
using seg2f::Rng;

Polygon rect(double x0, double y0, double w, double h) {
  return Polygon{{{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + h}, {x0, y0 + h}}};
}

Detection det(Polygon poly, double score, const std::string& asset) {
  Detection d;
  d.poly = std::move(poly);
  d.score = score;
  d.asset_id = asset;
  return d;
}

// All-pairs union-find, no spatial pruning.
std::vector<std::vector<int>> grouping_oracle(
    const std::vector<Detection>& dets, double iou_thr) {
  const int n = static_cast<int>(dets.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  const std::function<int(int)> find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (seg2f::polygon_iou(dets[i].poly, dets[j].poly) < iou_thr) continue;
      const int a = find(i), b = find(j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::vector<int>> groups(n);
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& g : groups)
    if (!g.empty()) out.push_back(std::move(g));
  return out;
}

std::vector<Detection> random_detections(Rng& rng, int n, double span) {
  std::vector<Detection> dets;
  for (int i = 0; i < n; ++i) {
    const double w = rng.uniform(2.0, 12.0);
    const double h = rng.uniform(2.0, 12.0);
    dets.push_back(det(rect(rng.uniform(0.0, span), rng.uniform(0.0, span),
                            w, h),
                       rng.next_double(), "a"));
  }
  return dets;
}

AssetCoverage single_asset(double span) {
  AssetCoverage cov;
  cov.footprints["a"] = rect(-10, -10, span + 20, span + 20);
  cov.quality["a"] = 1.0;
  return cov;
}

}  // namespace

TEST_CASE("covering reports assets containing a point") {
  AssetCoverage cov;
  cov.footprints["left"] = rect(0, 0, 10, 10);
  cov.footprints["right"] = rect(5, 0, 10, 10);
  cov.quality["left"] = 1.0;
  cov.quality["right"] = 0.5;
  CHECK(cov.covering(2, 2) == std::vector<std::string>{"left"});
  const auto both = cov.covering(7, 7);
  CHECK(both.size() == 2);
  CHECK(cov.covering(30, 30).empty());
}

TEST_CASE("group_detections fixture") {
  // a overlaps b, b overlaps c (transitive chain), d is elsewhere.
  const std::vector<Detection> dets = {
      det(rect(0, 0, 10, 10), 0.9, "a"),
      det(rect(2, 0, 10, 10), 0.8, "a"),   // iou with a = 8/12 = 2/3
      det(rect(4, 0, 10, 10), 0.7, "a"),   // iou with b = 2/3, with a = 6/14
      det(rect(50, 50, 10, 10), 0.6, "a"),
  };
  const auto groups = seg2f::group_detections(dets, 0.5);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0] == std::vector<int>{0, 1, 2});
  CHECK(groups[1] == std::vector<int>{3});
}

TEST_CASE("group_detections matches the all-pairs oracle") {
  Rng rng(71);
  for (int trial = 0; trial < 12; ++trial) {
    // Dense spans force plenty of overlap; sparse ones scatter.
    const double span = trial % 2 == 0 ? 30.0 : 120.0;
    const auto dets = random_detections(rng, 60, span);
    const auto got = seg2f::group_detections(dets, 0.5);
    const auto want = grouping_oracle(dets, 0.5);
    CHECK(got == want);
  }
}

TEST_CASE("group order follows the smallest member") {
  const std::vector<Detection> dets = {
      det(rect(50, 50, 10, 10), 0.6, "a"),
      det(rect(0, 0, 10, 10), 0.9, "a"),
      det(rect(1, 0, 10, 10), 0.8, "a"),
  };
  const auto groups = seg2f::group_detections(dets, 0.5);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0] == std::vector<int>{0});
  CHECK(groups[1] == std::vector<int>{1, 2});
}

TEST_CASE("deduplicate keeps the best of each group") {
  AssetCoverage cov;
  cov.footprints["good"] = rect(-100, -100, 300, 300);
  cov.footprints["bad"] = rect(-100, -100, 300, 300);
  cov.quality["good"] = 1.0;
  cov.quality["bad"] = 0.5;

  // Same building seen from two assets; score * quality decides.
  const std::vector<Detection> dets = {
      det(rect(0, 0, 10, 10), 0.8, "bad"),   // key 0.40
      det(rect(1, 0, 10, 10), 0.7, "good"),  // key 0.70, wins
      det(rect(40, 40, 8, 8), 0.9, "good"),  // alone
  };
  const auto kept = seg2f::deduplicate(dets, cov);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].score == 0.7);
  CHECK(kept[0].asset_id == "good");
  CHECK(kept[1].score == 0.9);
}

TEST_CASE("deduplicate breaks key ties by area then input order") {
  const AssetCoverage cov = single_asset(100);
  const std::vector<Detection> dets = {
      det(rect(0, 0, 10, 10), 0.8, "a"),
      det(rect(0, 0, 10, 11), 0.8, "a"),  // same key, larger area: wins
  };
  const auto kept = seg2f::deduplicate(dets, cov);
  REQUIRE(kept.size() == 1);
  CHECK(seg2f::polygon_area(kept[0].poly) == 110.0);

  const std::vector<Detection> same = {
      det(rect(0, 0, 10, 10), 0.8, "a"),
      det(rect(0.5, 0, 10, 10), 0.8, "a"),
  };
  const auto first = seg2f::deduplicate(same, cov);
  REQUIRE(first.size() == 1);
  CHECK(first[0].poly.ring[0].x == 0.0);  // input order breaks the tie
}

TEST_CASE("agreement filter drops weak detections seen by several assets") {
  AssetCoverage cov;
  cov.footprints["a"] = rect(0, 0, 100, 100);
  cov.footprints["b"] = rect(0, 0, 50, 100);  // overlaps the left half
  cov.quality["a"] = 1.0;
  cov.quality["b"] = 1.0;

  const std::vector<Detection> dets = {
      // Weak and double-covered: only asset a reported it, b disagrees.
      det(rect(10, 10, 8, 8), 0.5, "a"),
      // Weak but single-covered: kept, nothing could confirm it.
      det(rect(70, 10, 8, 8), 0.5, "a"),
      // Strong and double-covered: kept on confidence.
      det(rect(10, 40, 8, 8), 0.9, "a"),
  };
  const auto kept = seg2f::deduplicate(dets, cov);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].poly.ring[0].y == 10.0);
  CHECK(kept[0].score == 0.5);
  CHECK(kept[0].poly.ring[0].x == 70.0);
  CHECK(kept[1].score == 0.9);
}

TEST_CASE("deduplicate is idempotent") {
  Rng rng(72);
  AssetCoverage cov;
  cov.footprints["a"] = rect(-20, -20, 140, 140);
  cov.footprints["b"] = rect(-20, -20, 90, 140);
  cov.quality["a"] = 0.9;
  cov.quality["b"] = 1.0;
  for (int trial = 0; trial < 10; ++trial) {
    auto dets = random_detections(rng, 40, 90.0);
    for (std::size_t i = 0; i < dets.size(); ++i)
      if (i % 2 == 0) dets[i].asset_id = "b";
    const auto once = seg2f::deduplicate(dets, cov);
    const auto twice = seg2f::deduplicate(once, cov);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
      CHECK(once[i].score == twice[i].score);
      CHECK(once[i].asset_id == twice[i].asset_id);
      REQUIRE(once[i].poly.ring.size() == twice[i].poly.ring.size());
      for (std::size_t v = 0; v < once[i].poly.ring.size(); ++v) {
        CHECK(once[i].poly.ring[v].x == twice[i].poly.ring[v].x);
        CHECK(once[i].poly.ring[v].y == twice[i].poly.ring[v].y);
      }
    }
  }
}

TEST_CASE("survivors never overlap at the grouping threshold") {
  Rng rng(73);
  const auto dets = random_detections(rng, 80, 60.0);
  const auto kept = seg2f::deduplicate(dets, single_asset(60));
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = i + 1; j < kept.size(); ++j)
      CHECK(seg2f::polygon_iou(kept[i].poly, kept[j].poly) < 0.5);
}

TEST_CASE("deduplicate validates inputs") {
  const std::vector<Detection> dets = {det(rect(0, 0, 4, 4), 0.9, "ghost")};
  CHECK_THROWS_AS(seg2f::deduplicate(dets, single_asset(10)),
                  seg2f::ValidationError);
  DedupParams params;
  params.agree_conf = 1.5;
  const std::vector<Detection> ok = {det(rect(0, 0, 4, 4), 0.9, "a")};
  CHECK_THROWS_AS(seg2f::deduplicate(ok, single_asset(10), params),
                  seg2f::ValidationError);
}
