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

#include "seg2f/loss.hpp"

#include <cmath>
#include <string>

#include "seg2f/kernels.hpp"

namespace seg2f {
namespace {

void require_same_shape(const Raster& a, const Raster& b, const char* what) {
  if (!a.same_shape(b))
    throw ValidationError(std::string(what) + ": shape mismatch");
}

void require_binary_labels(const Raster& y, const char* what) {
  for (const double v : y.values())
    if (v != 0.0 && v != 1.0)
      throw ValidationError(std::string(what) +
                            ": labels must be binarized to {0, 1}");
}

void require_weights(const Raster& w, const char* what) {
  for (const double v : w.values())
    if (!(v >= 0.0))
      throw ValidationError(std::string(what) +
                            ": weights must be nonnegative");
}

void require_params(const LossParams& p) {
  if (!(p.epsilon > 0.0) || !(p.epsilon < 0.5))
    throw ValidationError("loss epsilon must be in (0, 0.5)");
  if (!(p.gamma > 0.0))
    throw ValidationError("loss gamma must be positive");
  if (!(p.beta >= 0.0) || !(p.beta <= 1.0))
    throw ValidationError("loss beta must be in [0, 1]");
  if (!(p.alpha >= 0.0))
    throw ValidationError("loss alpha must be nonnegative");
}

Raster grad_like(const Raster& yhat) {
  return Raster(RasterKind::kWeight, yhat.height(), yhat.width(), 0.0);
}

}  // namespace

LossResult weighted_cross_entropy(const Raster& y, const Raster& yhat,
                                  const Raster& w, const LossParams& params) {
  require_params(params);
  require_same_shape(y, yhat, "weighted_cross_entropy");
  require_same_shape(y, w, "weighted_cross_entropy");
  require_binary_labels(y, "weighted_cross_entropy");
  require_weights(w, "weighted_cross_entropy");

  LossResult out;
  out.grad = grad_like(yhat);
  out.loss = kernels::ops().weighted_ce(y.data(), yhat.data(), w.data(),
                                        y.size(), params.epsilon,
                                        out.grad.data());
  return out;
}

LossResult focal_tversky(const Raster& y, const Raster& yhat,
                         const LossParams& params) {
  require_params(params);
  require_same_shape(y, yhat, "focal_tversky");
  require_binary_labels(y, "focal_tversky");

  double syy = 0.0, sy = 0.0, syh = 0.0;
  const auto& k = kernels::ops();
  k.tversky_sums(y.data(), yhat.data(), y.size(), &syy, &sy, &syh);

  const double num = syy + params.epsilon;
  const double den =
      (1.0 - params.beta) * sy + params.beta * syh + params.epsilon;
  const double ratio = num / den;
  const double margin = 1.0 - ratio;

  LossResult out;
  out.grad = grad_like(yhat);
  if (margin < 1e-12) {
    // Perfect overlap; the loss bottoms out and the gradient vanishes.
    out.loss = 0.0;
    return out;
  }
  out.loss = std::pow(margin, params.gamma);
  // d loss / d yhat_i is affine in y_i:
  //   -gamma margin^(gamma-1) (y_i den - num beta) / den^2
  const double c =
      -params.gamma * std::pow(margin, params.gamma - 1.0) / (den * den);
  k.affine(y.data(), y.size(), c * den, -(c * num * params.beta),
           out.grad.data());
  return out;
}

LossResult combined_loss(const Raster& y, const Raster& yhat, const Raster& w,
                         const LossParams& params) {
  const LossResult ce = weighted_cross_entropy(y, yhat, w, params);
  const LossResult ftl = focal_tversky(y, yhat, params);

  LossResult out;
  out.loss = ce.loss + params.alpha * ftl.loss;
  out.grad = grad_like(yhat);
  kernels::ops().blend(ce.grad.data(), ftl.grad.data(), out.grad.size(), 1.0,
                       params.alpha, out.grad.data());
  return out;
}

std::vector<Raster> mixup_blend(const std::vector<Raster>& x,
                                const std::vector<Raster>& x2, double lambda) {
  if (!(lambda >= 0.0) || !(lambda <= 1.0))
    throw ValidationError("mixup lambda must be in [0, 1]");
  if (x.size() != x2.size())
    throw ValidationError("mixup_blend: channel count mismatch");
  std::vector<Raster> out;
  out.reserve(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) {
    require_same_shape(x[c], x2[c], "mixup_blend");
    Raster mixed(x[c].kind(), x[c].height(), x[c].width(), 0.0);
    kernels::ops().blend(x[c].data(), x2[c].data(), mixed.size(), lambda,
                         1.0 - lambda, mixed.data());
    out.push_back(std::move(mixed));
  }
  return out;
}

LossResult mixup_cross_entropy(const Raster& y, const Raster& wy,
                               const Raster& y2, const Raster& wy2,
                               const Raster& yhat, double lambda,
                               const LossParams& params) {
  if (!(lambda >= 0.0) || !(lambda <= 1.0))
    throw ValidationError("mixup lambda must be in [0, 1]");
  const LossResult a = weighted_cross_entropy(y, yhat, wy, params);
  const LossResult b = weighted_cross_entropy(y2, yhat, wy2, params);

  LossResult out;
  out.loss = lambda * a.loss + (1.0 - lambda) * b.loss;
  out.grad = grad_like(yhat);
  kernels::ops().blend(a.grad.data(), b.grad.data(), out.grad.size(), lambda,
                       1.0 - lambda, out.grad.data());
  return out;
}

LossResult focal_kl(const Raster& pt, const Raster& ps, const Raster& w,
                    const LossParams& params) {
  require_params(params);
  require_same_shape(pt, ps, "focal_kl");
  require_same_shape(pt, w, "focal_kl");
  require_weights(w, "focal_kl");

  const std::size_t n = pt.size();
  std::vector<double> tc(n), sc(n);
  const auto& k = kernels::ops();
  k.clamp(pt.data(), n, params.epsilon, 1.0 - params.epsilon, tc.data());
  k.clamp(ps.data(), n, params.epsilon, 1.0 - params.epsilon, sc.data());

  LossResult out;
  out.grad = grad_like(ps);
  out.loss = k.focal_kl(tc.data(), sc.data(), w.data(), n, params.gamma,
                        out.grad.data());
  return out;
}

}  // namespace seg2f
