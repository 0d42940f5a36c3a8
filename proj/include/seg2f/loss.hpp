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

#ifndef SEG2F_LOSS_HPP_
#define SEG2F_LOSS_HPP_

#include <vector>

#include "seg2f/raster.hpp"

namespace seg2f {

struct LossParams {
  double alpha = 0.5;     // weight of the Tversky term in the combined loss
  double beta = 0.99;     // Tversky false-positive/false-negative balance
  double gamma = 0.25;    // focal exponent
  double epsilon = 1e-6;  // numerical guard
  double lambda = 0.05;   // mixup blend factor
};

// Losses reduce by summation; mean() divides by the pixel count for
// reporting.
struct LossResult {
  double loss = 0.0;
  Raster grad;  // d loss / d prediction, same shape as the prediction

  double mean() const {
    return grad.size() == 0 ? 0.0 : loss / static_cast<double>(grad.size());
  }
};

// Weighted binary cross-entropy. y is a binarized label raster, yhat a
// confidence raster, w a weight raster; all same shape. Predictions are
// guarded by epsilon inside the logs; the gradient
//   w * (yhat - y) / (yhat * (1 - yhat))
// is defined as 0 where yhat lies outside [epsilon, 1 - epsilon].
LossResult weighted_cross_entropy(const Raster& y, const Raster& yhat,
                                  const Raster& w,
                                  const LossParams& params = {});

// Focal Tversky loss over the whole raster:
//   N = sum(y*yhat) + eps,  D = (1-beta)*sum(y) + beta*sum(yhat) + eps
//   L = (1 - N/D)^gamma
// The gradient is affine in y: dL/dyhat_i = -gamma (1-N/D)^(gamma-1)
// (y_i D - N beta) / D^2, taken as 0 when 1 - N/D vanishes.
LossResult focal_tversky(const Raster& y, const Raster& yhat,
                         const LossParams& params = {});

// L = L_ce + alpha * L_ftl, gradients added accordingly.
LossResult combined_loss(const Raster& y, const Raster& yhat, const Raster& w,
                         const LossParams& params = {});

// Image mixup: every channel becomes lambda * x + (1 - lambda) * x2.
// Labels are never blended.
std::vector<Raster> mixup_blend(const std::vector<Raster>& x,
                                const std::vector<Raster>& x2, double lambda);

// Cross-entropy under mixup: the two label/weight pairs are scored
// against the same prediction and combined as
//   lambda * CE(y, yhat, wy) + (1 - lambda) * CE(y2, yhat, wy2).
// Only the cross-entropy term participates in mixup; the Tversky term
// does not.
LossResult mixup_cross_entropy(const Raster& y, const Raster& wy,
                               const Raster& y2, const Raster& wy2,
                               const Raster& yhat, double lambda,
                               const LossParams& params = {});

// Focal distillation between a teacher confidence raster pt and a student
// raster ps, per pixel:
//   kl   = pt ln(pt/ps) + (1-pt) ln((1-pt)/(1-ps))   (both clamped)
//   loss = w * (1 - exp(-kl))^gamma * kl
// Pixels with kl < 1e-12 contribute zero loss and gradient.
LossResult focal_kl(const Raster& pt, const Raster& ps, const Raster& w,
                    const LossParams& params = {});

}  // namespace seg2f

#endif  // SEG2F_LOSS_HPP_
