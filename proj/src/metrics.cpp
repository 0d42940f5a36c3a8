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

#include "seg2f/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "seg2f/errors.hpp"
#include "seg2f/geometry.hpp"

namespace seg2f {

MatchResult match_detections(const std::vector<Detection>& dets,
                             const std::vector<GroundTruth>& gts,
                             double iou_thr, double resolution) {
  if (!(iou_thr > 0.0 && iou_thr <= 1.0))
    throw ValidationError("iou threshold must be in (0, 1]");
  for (const Detection& d : dets)
    if (!std::isfinite(d.score))
      throw ValidationError("detection scores must be finite");

  MatchResult result;
  result.entries.resize(dets.size());
  for (const GroundTruth& gt : gts)
    if (!gt.dense) ++result.n_gt;

  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return dets[a].score > dets[b].score;
                   });

  std::vector<BBox> det_boxes(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i)
    det_boxes[i] = polygon_bbox(dets[i].poly);
  std::vector<BBox> gt_boxes(gts.size());
  for (std::size_t g = 0; g < gts.size(); ++g)
    gt_boxes[g] = polygon_bbox(gts[g].poly);

  std::vector<char> used(gts.size(), 0);
  for (const std::size_t i : order) {
    MatchEntry& entry = result.entries[i];
    entry.score = dets[i].score;

    double best_iou = 0.0;
    int best_g = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gts[g].dense || used[g]) continue;
      if (!det_boxes[i].intersects(gt_boxes[g])) continue;
      const double iou = polygon_iou(dets[i].poly, gts[g].poly, resolution);
      if (iou >= iou_thr && iou > best_iou) {
        best_iou = iou;
        best_g = static_cast<int>(g);
      }
    }
    if (best_g >= 0) {
      entry.verdict = Verdict::kTruePositive;
      entry.gt_index = best_g;
      used[best_g] = 1;
      continue;
    }

    entry.verdict = Verdict::kFalsePositive;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!gts[g].dense) continue;
      if (!det_boxes[i].intersects(gt_boxes[g])) continue;
      if (polygon_iou(dets[i].poly, gts[g].poly, resolution) >= iou_thr) {
        entry.verdict = Verdict::kIgnored;
        entry.gt_index = static_cast<int>(g);
        break;
      }
    }
  }
  return result;
}

MatchResult pool_matches(const std::vector<MatchResult>& parts) {
  MatchResult pooled;
  for (const MatchResult& part : parts) {
    pooled.n_gt += part.n_gt;
    for (MatchEntry entry : part.entries) {
      entry.gt_index = -1;  // per-source ground-truth identity does not pool
      pooled.entries.push_back(entry);
    }
  }
  return pooled;
}

std::vector<PRPoint> pr_curve(const MatchResult& m) {
  if (m.n_gt < 1)
    throw ValidationError(
        "pr_curve needs at least one countable ground truth");

  std::vector<MatchEntry> counted;
  for (const MatchEntry& e : m.entries)
    if (e.verdict != Verdict::kIgnored) counted.push_back(e);
  std::stable_sort(counted.begin(), counted.end(),
                   [](const MatchEntry& a, const MatchEntry& b) {
                     return a.score > b.score;
                   });

  std::vector<PRPoint> curve;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < counted.size();) {
    const double score = counted[i].score;
    for (; i < counted.size() && counted[i].score == score; ++i) {
      if (counted[i].verdict == Verdict::kTruePositive)
        ++tp;
      else
        ++fp;
    }
    PRPoint pt;
    pt.score = score;
    pt.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    pt.recall = static_cast<double>(tp) / static_cast<double>(m.n_gt);
    curve.push_back(pt);
  }
  return curve;
}

double average_precision(const std::vector<PRPoint>& curve, ApMode mode) {
  if (curve.empty()) return 0.0;

  // Points arrive in descending score, so recall ascends along the vector.
  const std::size_t k = curve.size();
  std::vector<double> env(k);
  env[k - 1] = curve[k - 1].precision;
  for (std::size_t i = k - 1; i-- > 0;)
    env[i] = std::max(curve[i].precision, env[i + 1]);

  if (mode == ApMode::kExact) {
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      ap += (curve[i].recall - prev_recall) * env[i];
      prev_recall = curve[i].recall;
    }
    return ap;
  }

  double sum = 0.0;
  std::size_t at = 0;
  for (int g = 0; g <= 100; ++g) {
    const double r = static_cast<double>(g) / 100.0;
    while (at < k && curve[at].recall < r) ++at;
    if (at < k) sum += env[at];
  }
  return sum / 101.0;
}

std::map<std::string, GroupEval> evaluate_groups(
    const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
    const std::map<std::string, std::string>& image_group, double iou_thr,
    double resolution) {
  for (const auto& [image, group] : image_group)
    if (group == "overall")
      throw ValidationError("group key 'overall' is reserved (image '" +
                            image + "')");
  for (const GroundTruth& gt : gts)
    if (image_group.find(gt.image_id) == image_group.end())
      throw ValidationError("ground-truth image '" + gt.image_id +
                            "' has no group");
  for (const Detection& det : dets)
    if (image_group.find(det.image_id) == image_group.end())
      throw ValidationError("detection image '" + det.image_id +
                            "' has no group");

  std::set<std::string> images;
  std::map<std::string, std::vector<Detection>> dets_by_image;
  std::map<std::string, std::vector<GroundTruth>> gts_by_image;
  for (const Detection& det : dets) {
    images.insert(det.image_id);
    dets_by_image[det.image_id].push_back(det);
  }
  for (const GroundTruth& gt : gts) {
    images.insert(gt.image_id);
    gts_by_image[gt.image_id].push_back(gt);
  }

  std::map<std::string, std::vector<MatchResult>> per_group;
  std::vector<MatchResult> all;
  for (const std::string& image : images) {
    MatchResult m = match_detections(dets_by_image[image], gts_by_image[image],
                                     iou_thr, resolution);
    per_group[image_group.at(image)].push_back(m);
    all.push_back(std::move(m));
  }

  const auto finish = [](const std::vector<MatchResult>& parts) {
    GroupEval eval;
    MatchResult pooled = pool_matches(parts);
    eval.n_gt = pooled.n_gt;
    if (pooled.n_gt > 0) {
      eval.curve = pr_curve(pooled);
      eval.ap_exact = average_precision(eval.curve, ApMode::kExact);
      eval.ap_101 = average_precision(eval.curve, ApMode::kInterp101);
    }
    return eval;
  };

  std::map<std::string, GroupEval> out;
  out["overall"] = finish(all);
  for (const auto& [key, parts] : per_group) out[key] = finish(parts);
  return out;
}

std::optional<double> calibrate_threshold(const MatchResult& m,
                                          double target_precision) {
  if (m.entries.empty())
    throw ValidationError("calibrate_threshold: empty match set");
  if (!(target_precision > 0.0 && target_precision <= 1.0))
    throw ValidationError("target precision must be in (0, 1]");
  for (const MatchEntry& e : m.entries)
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
      throw ValidationError("match weights must be finite and nonnegative");

  std::vector<MatchEntry> entries = m.entries;
  std::stable_sort(entries.begin(), entries.end(),
                   [](const MatchEntry& a, const MatchEntry& b) {
                     return a.score > b.score;
                   });

  std::optional<double> best;
  double wtp = 0.0, wfp = 0.0;
  for (std::size_t i = 0; i < entries.size();) {
    const double score = entries[i].score;
    for (; i < entries.size() && entries[i].score == score; ++i) {
      if (entries[i].verdict == Verdict::kTruePositive)
        wtp += entries[i].weight;
      else if (entries[i].verdict == Verdict::kFalsePositive)
        wfp += entries[i].weight;
    }
    const double denom = wtp + wfp;
    if (denom > 0.0 && wtp / denom >= target_precision) best = score;
  }
  return best;
}

}  // namespace seg2f
