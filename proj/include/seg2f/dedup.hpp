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

#ifndef SEG2F_DEDUP_HPP_
#define SEG2F_DEDUP_HPP_

#include <map>
#include <string>
#include <vector>

#include "seg2f/detection.hpp"

namespace seg2f {

// Which imagery assets cover which ground region, with a quality score
// per asset. Footprints live in the same coordinate frame as the
// detections.
struct AssetCoverage {
  std::map<std::string, Polygon> footprints;
  std::map<std::string, double> quality;

  // Assets whose footprint contains the point.
  std::vector<std::string> covering(double x, double y) const;
};

struct DedupParams {
  double iou_thr = 0.5;
  double agree_conf = 0.65;
  double resolution = 4.0;
};

// Union-find transitive grouping: two detections join when their polygon
// IoU reaches iou_thr. Candidate pairs come from a uniform spatial grid
// whose cell size is twice the median bounding-box diagonal. Groups are
// returned as ascending index lists, ordered by smallest member.
std::vector<std::vector<int>> group_detections(
    const std::vector<Detection>& detections, double iou_thr = 0.5,
    double resolution = 4.0);

// Cross-asset deduplication: groups overlapping detections, keeps the one
// with the highest score * asset quality per group (ties: larger area,
// then input order), then applies the agreement filter: a kept detection
// whose centroid is covered by two or more assets needs score >=
// agree_conf, otherwise the overlapping imagery failed to confirm it and
// it is dropped. Running the result through deduplicate again changes
// nothing.
std::vector<Detection> deduplicate(const std::vector<Detection>& detections,
                                   const AssetCoverage& coverage,
                                   const DedupParams& params = {});

}  // namespace seg2f

#endif  // SEG2F_DEDUP_HPP_
