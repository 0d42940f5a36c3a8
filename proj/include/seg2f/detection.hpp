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

#ifndef SEG2F_DETECTION_HPP_
#define SEG2F_DETECTION_HPP_

#include <string>

#include "seg2f/raster.hpp"

namespace seg2f {

// One detected building footprint.
struct Detection {
  Polygon poly;
  double score = 0.0;       // confidence in [0, 1]
  std::string image_id;     // which image/tile it came from
  std::string asset_id;     // source imagery asset
  std::string acquired;     // RFC 3339 timestamp, may be empty
  double quality = 1.0;     // imagery quality in [0, 1]
};

// One ground-truth footprint. Dense regions mark building groups that are
// scored as ignore regions rather than individual instances.
struct GroundTruth {
  Polygon poly;
  bool dense = false;
  std::string image_id;
  std::string group;  // evaluation category key, e.g. terrain type
};

}  // namespace seg2f

#endif  // SEG2F_DETECTION_HPP_
