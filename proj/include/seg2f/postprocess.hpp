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

#ifndef SEG2F_POSTPROCESS_HPP_
#define SEG2F_POSTPROCESS_HPP_

#include <vector>

#include "seg2f/detection.hpp"
#include "seg2f/raster.hpp"

namespace seg2f {

// Binary mask of conf >= t.
Raster threshold(const Raster& conf, double t);

// Instance ids 1..K assigned to 4-connected foreground components in
// first-encounter raster order; scores[i] belongs to id i+1.
struct InstanceMap {
  Raster ids;
  std::vector<double> scores;
};

InstanceMap connected_components(const Raster& mask);

// Sets every instance's score to its mean confidence.
InstanceMap score_instances(InstanceMap instances, const Raster& conf);

// Grows every instance by the 3x3 kernel, undoing the label-side erosion.
// A pixel claimed by several instances goes to the higher-scoring one,
// with the lower id winning ties.
InstanceMap dilate_instances(const InstanceMap& instances);

// Resizes every mask to target_h x target_w and averages. The result does
// not depend on the order of the masks, and each output pixel stays
// within the [min, max] envelope of the resized inputs.
Raster average_masks(const std::vector<Raster>& masks, int target_h,
                     int target_w);

struct VectorizeParams {
  double simplify_tolerance = 0.5;  // 0 keeps every corner vertex
};

// Traces each instance's outer boundary along the pixel grid (vertices at
// pixel corners), fills interior holes, and simplifies the ring with
// Douglas-Peucker at the given tolerance. With tolerance 0 the polygon
// rasterizes back to exactly the instance's filled mask. Scores carry
// over; detections come out in instance-id order.
std::vector<Detection> vectorize(const InstanceMap& instances,
                                 const VectorizeParams& params = {});

// Drops detections whose polygon area is below min_pixels.
std::vector<Detection> min_area_filter(std::vector<Detection> detections,
                                       double min_pixels = 4.0);

}  // namespace seg2f

#endif  // SEG2F_POSTPROCESS_HPP_
