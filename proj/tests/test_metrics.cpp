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
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "doctest.h"
#include "seg2f/metrics.hpp"
#include "seg2f/rng.hpp"

namespace {

using seg2f::ApMode;
using seg2f::Detection;
using seg2f::GroundTruth;
using seg2f::MatchEntry;
using seg2f::MatchResult;
using seg2f::Polygon;
using seg2f::PRPoint;
using seg2f::Rng;
using seg2f::Verdict;

Polygon rect(double x0, double y0, double w, double h) {
  return Polygon{{{x0, y0}, {x0 + w, y0}, {x0 + w, y0 + h}, {x0, y0 + h}}};
}

Detection det(Polygon poly, double score, const std::string& image = "") {
  Detection d;
  d.poly = std::move(poly);
  d.score = score;
  d.image_id = image;
  return d;
}

GroundTruth gt(Polygon poly, bool dense = false, const std::string& image = "",
               const std::string& group = "") {
  GroundTruth g;
  g.poly = std::move(poly);
  g.dense = dense;
  g.image_id = image;
  g.group = group;
  return g;
}

MatchEntry entry(double score, Verdict verdict, double weight = 1.0) {
  MatchEntry e;
  e.score = score;
  e.verdict = verdict;
  e.weight = weight;
  return e;
}

// Literal restatement of the precision-recall definitions, O(n^2).
std::vector<PRPoint> curve_oracle(const MatchResult& result) {
  std::vector<MatchEntry> live;
  for (const auto& e : result.entries)
    if (e.verdict != Verdict::kIgnored) live.push_back(e);
  std::stable_sort(live.begin(), live.end(),
                   [](const MatchEntry& a, const MatchEntry& b) {
                     return a.score > b.score;
                   });
  std::vector<PRPoint> points;
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (i + 1 < live.size() && live[i + 1].score == live[i].score) continue;
    int tp = 0, fp = 0;
    for (std::size_t j = 0; j <= i; ++j) {
      if (live[j].verdict == Verdict::kTruePositive)
        ++tp;
      else
        ++fp;
    }
    PRPoint p;
    p.score = live[i].score;
    p.precision = double(tp) / double(tp + fp);
    p.recall = double(tp) / double(result.n_gt);
    points.push_back(p);
  }
  return points;
}

double ap_exact_oracle(const std::vector<PRPoint>& curve) {
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    double env = 0.0;
    for (std::size_t j = k; j < curve.size(); ++j)
      env = std::max(env, curve[j].precision);
    ap += (curve[k].recall - prev_recall) * env;
    prev_recall = curve[k].recall;
  }
  return ap;
}

double ap_interp_oracle(const std::vector<PRPoint>& curve) {
  double sum = 0.0;
  for (int g = 0; g <= 100; ++g) {
    const double r = g / 100.0;
    double env = 0.0;
    for (const auto& p : curve)
      if (p.recall >= r) env = std::max(env, p.precision);
    sum += env;
  }
  return sum / 101.0;
}

MatchResult random_match_result(Rng& rng) {
  MatchResult result;
  result.n_gt = 1 + static_cast<int>(rng.bounded(8));
  const int n_tp = static_cast<int>(rng.bounded(result.n_gt + 1));
  const int n_fp = static_cast<int>(rng.bounded(10));
  const int n_ig = static_cast<int>(rng.bounded(4));
  // Coarse score grid so ties are common.
  const auto pick_score = [&] { return 0.05 * double(1 + rng.bounded(19)); };
  for (int i = 0; i < n_tp; ++i)
    result.entries.push_back(
        entry(pick_score(), Verdict::kTruePositive, 0.25 * (1 + rng.bounded(8))));
  for (int i = 0; i < n_fp; ++i)
    result.entries.push_back(
        entry(pick_score(), Verdict::kFalsePositive, 0.25 * (1 + rng.bounded(8))));
  for (int i = 0; i < n_ig; ++i)
    result.entries.push_back(entry(pick_score(), Verdict::kIgnored));
  // Shuffle so sorting is exercised.
  for (std::size_t i = result.entries.size(); i > 1; --i)
    std::swap(result.entries[i - 1], result.entries[rng.bounded(i)]);
  return result;
}

}  // namespace

TEST_CASE("match_detections basic verdicts") {
  const std::vector<GroundTruth> truth = {gt(rect(0, 0, 4, 4))};
  const std::vector<Detection> dets = {
      det(rect(0, 0, 4, 4), 0.9),    // perfect hit
      det(rect(0, 0, 4, 3), 0.8),    // also overlaps, ground truth taken
      det(rect(20, 20, 4, 4), 0.7),  // overlaps nothing
  };
  const MatchResult r = seg2f::match_detections(dets, truth, 0.5);
  CHECK(r.n_gt == 1);
  REQUIRE(r.entries.size() == 3);
  // Entries keep detection input order; verdicts map back one-to-one.
  CHECK(r.entries[0].score == 0.9);
  CHECK(r.entries[0].verdict == Verdict::kTruePositive);
  CHECK(r.entries[0].gt_index == 0);
  CHECK(r.entries[1].verdict == Verdict::kFalsePositive);
  CHECK(r.entries[2].verdict == Verdict::kFalsePositive);
}

TEST_CASE("match_detections takes the highest-iou ground truth") {
  const std::vector<GroundTruth> truth = {
      gt(rect(0, 0, 4, 4)),  // iou 1/3 with the detection
      gt(rect(0, 0, 4, 6)),  // iou 2/3
  };
  const std::vector<Detection> dets = {det(rect(0, 2, 4, 4), 0.9)};
  const MatchResult r = seg2f::match_detections(dets, truth, 0.3);
  CHECK(r.entries[0].verdict == Verdict::kTruePositive);
  CHECK(r.entries[0].gt_index == 1);
}

TEST_CASE("match_detections greedy order follows score") {
  // The higher-scoring detection claims the only ground truth even though
  // the lower-scoring one fits better.
  const std::vector<GroundTruth> truth = {gt(rect(0, 0, 4, 4))};
  const std::vector<Detection> dets = {
      det(rect(0, 0, 4, 4), 0.6),  // exact fit, lower score
      det(rect(0, 0, 4, 5), 0.9),  // iou 0.8, higher score
  };
  const MatchResult r = seg2f::match_detections(dets, truth, 0.5);
  CHECK(r.entries[0].score == 0.6);
  CHECK(r.entries[0].verdict == Verdict::kFalsePositive);
  CHECK(r.entries[1].verdict == Verdict::kTruePositive);
  CHECK(r.entries[1].gt_index == 0);
}

TEST_CASE("dense regions absorb unmatched detections") {
  const std::vector<GroundTruth> truth = {
      gt(rect(0, 0, 8, 8), true),   // dense region
      gt(rect(20, 0, 4, 4), false)  // countable building
  };
  const std::vector<Detection> dets = {
      det(rect(0, 0, 8, 6), 0.9),    // iou 0.75 with the dense region
      det(rect(20, 0, 4, 4), 0.8),   // hits the building
      det(rect(40, 40, 4, 4), 0.7),  // plain miss
  };
  const MatchResult r = seg2f::match_detections(dets, truth, 0.5);
  CHECK(r.n_gt == 1);  // dense regions are not countable
  CHECK(r.entries[0].verdict == Verdict::kIgnored);
  CHECK(r.entries[1].verdict == Verdict::kTruePositive);
  CHECK(r.entries[1].gt_index == 1);
  CHECK(r.entries[2].verdict == Verdict::kFalsePositive);
}

TEST_CASE("dense overlap uses the same iou threshold") {
  const std::vector<GroundTruth> truth = {gt(rect(0, 0, 4, 4), true)};
  // Overlap 2x4 = 8, union 24, iou 1/3.
  const std::vector<Detection> dets = {det(rect(2, 0, 4, 4), 0.9)};
  const MatchResult strict = seg2f::match_detections(dets, truth, 0.5);
  CHECK(strict.entries[0].verdict == Verdict::kFalsePositive);
  const MatchResult loose = seg2f::match_detections(dets, truth, 0.3);
  CHECK(loose.entries[0].verdict == Verdict::kIgnored);
}

TEST_CASE("match_detections validates inputs") {
  CHECK_THROWS_AS(seg2f::match_detections({}, {}, 0.0),
                  seg2f::ValidationError);
  CHECK_THROWS_AS(seg2f::match_detections({}, {}, 1.5),
                  seg2f::ValidationError);
  CHECK_NOTHROW(seg2f::match_detections({}, {}, 1.0));
  std::vector<Detection> bad = {det(rect(0, 0, 2, 2), std::nan(""))};
  CHECK_THROWS_AS(seg2f::match_detections(bad, {}, 0.5),
                  seg2f::ValidationError);
}

TEST_CASE("pool_matches concatenates and drops per-image gt identity") {
  MatchResult a, b;
  a.n_gt = 2;
  a.entries = {entry(0.9, Verdict::kTruePositive)};
  a.entries[0].gt_index = 1;
  b.n_gt = 3;
  b.entries = {entry(0.4, Verdict::kFalsePositive)};
  const MatchResult pooled = seg2f::pool_matches({a, b});
  CHECK(pooled.n_gt == 5);
  REQUIRE(pooled.entries.size() == 2);
  CHECK(pooled.entries[0].gt_index == -1);
  CHECK(pooled.entries[0].score == 0.9);
}

TEST_CASE("pr_curve frozen fixture") {
  MatchResult r;
  r.n_gt = 2;
  r.entries = {entry(0.9, Verdict::kTruePositive),
               entry(0.8, Verdict::kFalsePositive),
               entry(0.7, Verdict::kTruePositive)};
  const auto curve = seg2f::pr_curve(r);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].score == 0.9);
  CHECK(curve[0].precision == 1.0);
  CHECK(curve[0].recall == 0.5);
  CHECK(curve[1].precision == 0.5);
  CHECK(curve[1].recall == 0.5);
  CHECK(curve[2].precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(curve[2].recall == 1.0);
}

TEST_CASE("pr_curve merges tied scores and skips ignored entries") {
  MatchResult r;
  r.n_gt = 4;
  r.entries = {entry(0.9, Verdict::kTruePositive),
               entry(0.9, Verdict::kFalsePositive),
               entry(0.9, Verdict::kTruePositive),
               entry(0.5, Verdict::kIgnored)};
  const auto curve = seg2f::pr_curve(r);
  REQUIRE(curve.size() == 1);  // one distinct live score
  CHECK(curve[0].precision == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(curve[0].recall == 0.5);

  MatchResult empty;
  empty.n_gt = 0;
  CHECK_THROWS_AS(seg2f::pr_curve(empty), seg2f::ValidationError);
}

TEST_CASE("ignored entries change nothing") {
  Rng rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    MatchResult base = random_match_result(rng);
    MatchResult noisy = base;
    const int extra = 1 + static_cast<int>(rng.bounded(5));
    for (int i = 0; i < extra; ++i) {
      MatchEntry e = entry(rng.next_double(), Verdict::kIgnored);
      noisy.entries.insert(
          noisy.entries.begin() + rng.bounded(noisy.entries.size() + 1), e);
    }
    const auto c1 = seg2f::pr_curve(base);
    const auto c2 = seg2f::pr_curve(noisy);
    REQUIRE(c1.size() == c2.size());
    for (std::size_t i = 0; i < c1.size(); ++i) {
      CHECK(c1[i].score == c2[i].score);
      CHECK(c1[i].precision == c2[i].precision);
      CHECK(c1[i].recall == c2[i].recall);
    }
    CHECK(seg2f::average_precision(c1, ApMode::kExact) ==
          seg2f::average_precision(c2, ApMode::kExact));
    CHECK(seg2f::average_precision(c1, ApMode::kInterp101) ==
          seg2f::average_precision(c2, ApMode::kInterp101));
  }
}

TEST_CASE("average_precision frozen fixture") {
  // Recall steps 0.5 at precision 1, then 1.0 at precision 2/3:
  // exact = 0.5 * 1 + 0.5 * 2/3 = 5/6; the 101-point grid averages 51
  // ones and 50 two-thirds.
  MatchResult r;
  r.n_gt = 2;
  r.entries = {entry(0.9, Verdict::kTruePositive),
               entry(0.8, Verdict::kFalsePositive),
               entry(0.7, Verdict::kTruePositive)};
  const auto curve = seg2f::pr_curve(r);
  CHECK(seg2f::average_precision(curve, ApMode::kExact) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(seg2f::average_precision(curve, ApMode::kInterp101) ==
        doctest::Approx(0.834983498349835).epsilon(1e-15));
  // Empty curve scores zero in both modes.
  CHECK(seg2f::average_precision({}, ApMode::kExact) == 0.0);
  CHECK(seg2f::average_precision({}, ApMode::kInterp101) == 0.0);
}

TEST_CASE("average_precision matches the exhaustive oracle") {
  Rng rng(62);
  for (int trial = 0; trial < 300; ++trial) {
    const MatchResult r = random_match_result(rng);
    const auto curve = seg2f::pr_curve(r);
    const auto want = curve_oracle(r);
    REQUIRE(curve.size() == want.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
      CHECK(curve[i].score == want[i].score);
      CHECK(curve[i].precision ==
            doctest::Approx(want[i].precision).epsilon(1e-15));
      CHECK(curve[i].recall == doctest::Approx(want[i].recall).epsilon(1e-15));
    }
    const double exact = seg2f::average_precision(curve, ApMode::kExact);
    const double interp = seg2f::average_precision(curve, ApMode::kInterp101);
    CHECK(std::fabs(exact - ap_exact_oracle(want)) <= 1e-12);
    CHECK(std::fabs(interp - ap_interp_oracle(want)) <= 1e-12);
  }
}

TEST_CASE("evaluate_groups pools per group and overall") {
  const std::vector<GroundTruth> truth = {
      gt(rect(0, 0, 4, 4), false, "img1", ""),
      gt(rect(10, 0, 4, 4), false, "img1", ""),
      gt(rect(0, 0, 4, 4), false, "img2", ""),
  };
  const std::vector<Detection> dets = {
      det(rect(0, 0, 4, 4), 0.9, "img1"),
      det(rect(10, 0, 4, 4), 0.8, "img1"),
      det(rect(0, 0, 4, 4), 0.7, "img2"),
      det(rect(30, 30, 4, 4), 0.6, "img2"),  // false positive
  };
  const std::map<std::string, std::string> groups = {{"img1", "urban"},
                                                     {"img2", "rural"}};
  const auto eval = seg2f::evaluate_groups(dets, truth, groups, 0.5);
  REQUIRE(eval.count("urban") == 1);
  REQUIRE(eval.count("rural") == 1);
  REQUIRE(eval.count("overall") == 1);
  CHECK(eval.at("urban").n_gt == 2);
  CHECK(eval.at("urban").ap_exact == 1.0);
  CHECK(eval.at("urban").ap_101 == 1.0);
  CHECK(eval.at("rural").n_gt == 1);
  CHECK(eval.at("rural").ap_exact == 1.0);  // the miss scores lower
  CHECK(eval.at("overall").n_gt == 3);
  CHECK(eval.at("overall").ap_exact == 1.0);

  // Matching is per image: an identical rectangle in the other image
  // must not steal the ground truth.
  const std::vector<Detection> cross = {det(rect(0, 0, 4, 4), 0.9, "img2")};
  const auto eval2 = seg2f::evaluate_groups(
      cross, {gt(rect(0, 0, 4, 4), false, "img1", "")}, groups, 0.5);
  CHECK(eval2.at("rural").n_gt == 0);
  CHECK(eval2.at("rural").ap_exact == 0.0);
  CHECK(eval2.at("rural").curve.empty());
  CHECK(eval2.at("urban").n_gt == 1);
  CHECK(eval2.at("urban").ap_exact == 0.0);
}

TEST_CASE("evaluate_groups validates keys") {
  const std::vector<Detection> dets = {det(rect(0, 0, 4, 4), 0.9, "img1")};
  const std::vector<GroundTruth> truth = {
      gt(rect(0, 0, 4, 4), false, "img1", "")};
  CHECK_THROWS_AS(seg2f::evaluate_groups(dets, truth, {}, 0.5),
                  seg2f::ValidationError);
  const std::map<std::string, std::string> reserved = {{"img1", "overall"}};
  CHECK_THROWS_AS(seg2f::evaluate_groups(dets, truth, reserved, 0.5),
                  seg2f::ValidationError);
}

TEST_CASE("calibrate_threshold frozen fixture") {
  MatchResult r;
  r.n_gt = 2;
  r.entries = {entry(0.9, Verdict::kTruePositive),
               entry(0.8, Verdict::kFalsePositive),
               entry(0.7, Verdict::kTruePositive)};
  const auto thr = seg2f::calibrate_threshold(r, 0.9);
  REQUIRE(thr.has_value());
  CHECK(*thr == 0.9);
  // Precision 2/3 is reachable at the lowest score.
  const auto low = seg2f::calibrate_threshold(r, 0.6);
  REQUIRE(low.has_value());
  CHECK(*low == 0.7);
  // Nothing reaches 0.99.
  MatchResult fp_only;
  fp_only.n_gt = 1;
  fp_only.entries = {entry(0.9, Verdict::kFalsePositive)};
  CHECK(!seg2f::calibrate_threshold(fp_only, 0.5).has_value());
}

TEST_CASE("calibrate_threshold weights shift the answer") {
  MatchResult r;
  r.n_gt = 2;
  r.entries = {entry(0.9, Verdict::kTruePositive, 1.0),
               entry(0.8, Verdict::kFalsePositive, 1.0),
               entry(0.7, Verdict::kTruePositive, 8.0)};
  // Unweighted precision at 0.7 is 2/3; weighted it is 9/10.
  const auto thr = seg2f::calibrate_threshold(r, 0.9);
  REQUIRE(thr.has_value());
  CHECK(*thr == 0.7);
}

TEST_CASE("calibrate_threshold matches the linear-scan oracle") {
  Rng rng(63);
  for (int trial = 0; trial < 300; ++trial) {
    const MatchResult r = random_match_result(rng);
    if (r.entries.empty()) continue;  // empty pools are rejected, tested below
    const double target = 0.05 * double(1 + rng.bounded(20));
    const auto got = seg2f::calibrate_threshold(r, target);

    // Oracle: try every distinct observed score as the cutoff.
    std::set<double> candidates;
    for (const auto& e : r.entries) candidates.insert(e.score);
    std::optional<double> want;
    for (double cut : candidates) {
      double wtp = 0.0, wfp = 0.0;
      for (const auto& e : r.entries) {
        if (e.score < cut) continue;
        if (e.verdict == Verdict::kTruePositive) wtp += e.weight;
        if (e.verdict == Verdict::kFalsePositive) wfp += e.weight;
      }
      if (wtp + wfp <= 0.0) continue;
      if (wtp / (wtp + wfp) >= target) {
        want = cut;
        break;  // ascending iteration: first hit is the smallest
      }
    }
    CHECK(got.has_value() == want.has_value());
    if (got && want) CHECK(*got == *want);
  }
}

TEST_CASE("calibrate_threshold validates inputs") {
  MatchResult empty;
  empty.n_gt = 0;
  CHECK_THROWS_AS(seg2f::calibrate_threshold(empty, 0.9),
                  seg2f::ValidationError);
  MatchResult r;
  r.n_gt = 1;
  r.entries = {entry(0.9, Verdict::kTruePositive)};
  CHECK_THROWS_AS(seg2f::calibrate_threshold(r, 0.0), seg2f::ValidationError);
  CHECK_THROWS_AS(seg2f::calibrate_threshold(r, 1.5), seg2f::ValidationError);
  CHECK_NOTHROW(seg2f::calibrate_threshold(r, 1.0));
  r.entries[0].weight = -1.0;
  CHECK_THROWS_AS(seg2f::calibrate_threshold(r, 0.9), seg2f::ValidationError);
}
