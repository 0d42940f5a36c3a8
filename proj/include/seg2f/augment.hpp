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

#ifndef SEG2F_AUGMENT_HPP_
#define SEG2F_AUGMENT_HPP_

#include <vector>

#include "seg2f/raster.hpp"
#include "seg2f/rng.hpp"

namespace seg2f {

// One training sample: image channels plus aligned labels and weights.
struct Sample {
  std::vector<Raster> image;
  Raster labels;
  Raster weights;
};

// The eight symmetries of the square, indexed 0..7: k in 0..3 rotates
// counter-clockwise by 90k degrees, k in 4..7 mirrors horizontally first
// and then rotates by 90(k-4).
Raster dihedral(const Raster& raster, int k);
Sample dihedral(const Sample& sample, int k);

// Inverse transform: dihedral_inverse(dihedral(r, k), k) == r.
Raster dihedral_inverse(const Raster& raster, int k);

// Axis-aligned crop of out_h x out_w at a uniformly random valid offset.
Sample random_crop(const Sample& sample, int out_h, int out_w, Rng& rng);

struct JitterMagnitudes {
  double brightness = 0.1;
  double contrast = 0.1;
  double saturation = 0.1;
  double hue = 0.1;
};

// Photometric jitter for 3-channel imagery. Brightness, contrast and
// saturation factors are drawn from [1 - m, 1 + m]; hue is an additive
// shift in [-m, m] turns. Outputs are clamped to [0, 1]. Draw order is
// fixed: brightness, contrast, saturation, hue.
std::vector<Raster> color_jitter(const std::vector<Raster>& image,
                                 const JitterMagnitudes& magnitudes, Rng& rng);

// Zeroes a random rectangle anchored to one raster edge in every image
// channel and in the weights, hiding the region from the loss. The
// rectangle's depth is at most max_fraction of the raster extent.
Sample black_mask(const Sample& sample, double max_fraction, Rng& rng);

}  // namespace seg2f

#endif  // SEG2F_AUGMENT_HPP_
