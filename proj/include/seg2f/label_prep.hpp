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

#ifndef SEG2F_LABEL_PREP_HPP_
#define SEG2F_LABEL_PREP_HPP_

#include "seg2f/raster.hpp"

namespace seg2f {

enum class MorphOp { kErode, kDilate };

// 3x3 binary morphology on a {0,1} mask; pixels outside the raster count
// as background.
Raster morph(const Raster& mask, MorphOp op);

// Erodes each instance independently with the 3x3 kernel so that abutting
// buildings become separated in the training labels. Class values are
// preserved. Instance identity comes from `instances` when given;
// otherwise instances are the 4-connected components of same-class
// foreground.
Raster erode_instances(const Raster& labels);
Raster erode_instances(const Raster& labels, const Raster& instances);

enum class DenseRemap { kToBuilding, kToIgnore };

struct RemappedLabels {
  Raster labels;  // binary: 0 background, 1 building
  Raster ignore;  // binary: 1 where the loss weight must be zeroed
};

// Folds the dense class into the binary label space: either dense pixels
// become buildings, or they are excluded from the loss via the ignore
// mask.
RemappedLabels remap_dense(const Raster& labels, DenseRemap mode);

// Marks foreground pixels that touch (4-neighborhood) background, a pixel
// of another class or instance, or the raster border. Expects labels with
// instance separation already applied.
Raster edge_image(const Raster& labels);
Raster edge_image(const Raster& labels, const Raster& instances);

struct GaussianWeightParams {
  double sigma = 3.0;
  double scale = 200.0;
  double floor = 1.0;
};

// omega = floor + scale * (G_sigma * E) where E is a binary edge image.
// The kernel is truncated at radius ceil(3 sigma), renormalized to sum 1,
// and convolved with zero padding outside the raster.
Raster gaussian_edge_weights(const Raster& edges,
                             const GaussianWeightParams& params = {});

// omega = exp(-(d1 + d2) / (2 sigma^2)) with d1 and d2 the Euclidean
// distances to the nearest and second-nearest instances. With fewer than
// two instances the missing distance is +infinity, so the weights vanish
// everywhere. Instance identity as in erode_instances.
Raster unet_distance_weights(const Raster& labels, double sigma = 5.0);
Raster unet_distance_weights(const Raster& labels, const Raster& instances,
                             double sigma = 5.0);

}  // namespace seg2f

#endif  // SEG2F_LABEL_PREP_HPP_
