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

#ifndef SEG2F_SYNTH_HPP_
#define SEG2F_SYNTH_HPP_

#include <cstdint>
#include <vector>

#include "seg2f/detection.hpp"
#include "seg2f/raster.hpp"

namespace seg2f {

// Synthetic scenes of axis-aligned rectangular buildings, for exercising
// the full pipeline without imagery or a model. The same seed always
// yields the same scene.
struct SceneParams {
  int size = 600;
  int min_buildings = 4;
  int max_buildings = 12;
  int min_side = 6;    // buildings are at least 6 px on a side
  int max_side = 48;
  double dense_prob = 0.25;  // chance a placement becomes a dense pair
  double noise = 0.0;        // confidence perturbation, in [0, 0.5)
  std::uint64_t seed = 0;
};

struct Scene {
  std::vector<Raster> image;          // 3 channels
  Raster labels;                      // 0/1/2
  std::vector<GroundTruth> truths;    // exact rectangles
  Raster confidence;                  // mock model output
};

// Places non-overlapping rectangles (isolated buildings keep a 1-pixel
// gap; dense placements are two abutting rectangles labeled class 2). The
// mock confidence is 1 inside each instance after per-instance 3x3
// erosion and 0 outside, then shifted by uniform noise in [-noise, +noise]
// and clamped to [0, 1]. With noise 0 the confidence is exactly the
// eroded instance mask.
Scene generate_scene(const SceneParams& params);

}  // namespace seg2f

#endif  // SEG2F_SYNTH_HPP_
