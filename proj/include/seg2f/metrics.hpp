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

#ifndef SEG2F_METRICS_HPP_
#define SEG2F_METRICS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "seg2f/detection.hpp"

namespace seg2f {

enum class Verdict { kTruePositive, kFalsePositive, kIgnored };

struct MatchEntry {
  double score = 0.0;
  Verdict verdict = Verdict::kFalsePositive;
  int gt_index = -1;     // matched ground truth, -1 if none
  double weight = 1.0;   // sample weight for calibration
};

// Matching outcome for one image (or a pool of images). n_gt counts
// non-dense ground truths; dense regions only absorb detections.
struct MatchResult {
  std::vector<MatchEntry> entries;
  int n_gt = 0;
};

// Greedy matching at one IoU threshold: detections sorted by descending
// score (ties keep input order) each take the unmatched non-dense ground
// truth of highest IoU >= iou_thr. Unmatched detections overlapping a
// dense region at iou_thr are ignored; the rest are false positives.
// Polygon IoU is evaluated at `resolution` pixels per unit.
MatchResult match_detections(const std::vector<Detection>& detections,
                             const std::vector<GroundTruth>& ground_truth,
                             double iou_thr, double resolution = 4.0);

// Concatenates per-image match results into one pool.
MatchResult pool_matches(const std::vector<MatchResult>& results);

struct PRPoint {
  double score = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// One point per distinct score, descending, computed over the cumulative
// prefix at that score. Ignored entries contribute to neither precision
// nor recall.
std::vector<PRPoint> pr_curve(const MatchResult& result);

enum class ApMode { kExact, kInterp101 };

// kExact integrates the precision envelope over recall; kInterp101
// averages the envelope at the 101 recall grid points 0.00, 0.01, .., 1.00.
double average_precision(const std::vector<PRPoint>& curve, ApMode mode);

struct GroupEval {
  std::vector<PRPoint> curve;
  double ap_exact = 0.0;
  double ap_101 = 0.0;
  int n_gt = 0;
};

// Matches per image, then pools images per group key ("overall" spans all
// images). Every image seen in a detection must carry a key, i.e. appear
// in image_group.
std::map<std::string, GroupEval> evaluate_groups(
    const std::vector<Detection>& detections,
    const std::vector<GroundTruth>& ground_truth,
    const std::map<std::string, std::string>& image_group, double iou_thr,
    double resolution = 4.0);

// Smallest observed score whose weighted precision over entries at or
// above it reaches target_precision; nullopt when no score qualifies.
std::optional<double> calibrate_threshold(const MatchResult& result,
                                          double target_precision);

}  // namespace seg2f

#endif  // SEG2F_METRICS_HPP_
