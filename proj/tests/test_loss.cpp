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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "seg2f/gradcheck.hpp"
#include "seg2f/loss.hpp"
#include "seg2f/raster.hpp"
#include "seg2f/rng.hpp"

namespace {

using seg2f::LossParams;
using seg2f::LossResult;
using seg2f::Raster;
using seg2f::RasterKind;
using seg2f::Rng;

Raster one_pixel(RasterKind kind, double v) {
  Raster r(kind, 1, 1);
  r.at(0, 0) = v;
  return r;
}

struct RandomBatch {
  Raster y, yhat, w;
};

RandomBatch random_batch(Rng& rng, int h, int w) {
  RandomBatch b{Raster(RasterKind::kLabel, h, w),
                Raster(RasterKind::kConfidence, h, w),
                Raster(RasterKind::kWeight, h, w)};
  for (int i = 0; i < h * w; ++i) {
    b.y.values()[i] = rng.bounded(2) ? 1.0 : 0.0;
    b.yhat.values()[i] = rng.uniform(0.05, 0.95);
    b.w.values()[i] = rng.uniform(0.0, 10.0);
  }
  return b;
}

}  // namespace

TEST_CASE("weighted cross-entropy fixtures") {
  const Raster y = one_pixel(RasterKind::kLabel, 1.0);
  const Raster yhat = one_pixel(RasterKind::kConfidence, 0.5);
  const Raster w = one_pixel(RasterKind::kWeight, 1.0);
  const LossResult r = seg2f::weighted_cross_entropy(y, yhat, w);
  CHECK(r.loss == doctest::Approx(0.6931471805599453).epsilon(1e-15));
  CHECK(r.grad.at(0, 0) == -2.0);
  CHECK(r.grad.size() == 1);
  CHECK(r.mean() == r.loss);

  // Weight doubles both loss and gradient linearly.
  const LossResult r2 = seg2f::weighted_cross_entropy(
      y, yhat, one_pixel(RasterKind::kWeight, 2.0));
  CHECK(r2.loss == doctest::Approx(2.0 * r.loss).epsilon(1e-15));
  CHECK(r2.grad.at(0, 0) == -4.0);
}

TEST_CASE("weighted cross-entropy is exactly zero on perfect predictions") {
  Raster y(RasterKind::kLabel, 2, 2);
  y.at(0, 0) = 1.0;
  y.at(1, 1) = 1.0;
  Raster yhat(RasterKind::kConfidence, 2, 2);
  yhat.values() = y.values();
  const Raster w(RasterKind::kWeight, 2, 2, 7.0);
  const LossResult r = seg2f::weighted_cross_entropy(y, yhat, w);
  CHECK(r.loss == 0.0);
  for (double g : r.grad.values()) CHECK(g == 0.0);
}

TEST_CASE("cross-entropy rejects shape or kind mismatches") {
  const Raster y = one_pixel(RasterKind::kLabel, 1.0);
  const Raster w = one_pixel(RasterKind::kWeight, 1.0);
  CHECK_THROWS_AS(
      seg2f::weighted_cross_entropy(
          y, Raster(RasterKind::kConfidence, 2, 1, 0.5), w),
      seg2f::ValidationError);
}

TEST_CASE("focal tversky fixtures") {
  const Raster y = one_pixel(RasterKind::kLabel, 1.0);
  const Raster w = one_pixel(RasterKind::kWeight, 1.0);

  // Total miss: loss just under 1.
  const LossResult miss =
      seg2f::focal_tversky(y, one_pixel(RasterKind::kConfidence, 0.0));
  CHECK(miss.loss == doctest::Approx(0.9999750015623828).epsilon(1e-13));

  // Half confidence on one positive pixel.
  const LossResult half =
      seg2f::focal_tversky(y, one_pixel(RasterKind::kConfidence, 0.5));
  CHECK(half.loss == doctest::Approx(0.31544194474199483).epsilon(1e-13));

  // Perfect prediction: the margin vanishes, loss and gradient are zero.
  const LossResult hit =
      seg2f::focal_tversky(y, one_pixel(RasterKind::kConfidence, 1.0));
  CHECK(hit.loss == 0.0);
  CHECK(hit.grad.at(0, 0) == 0.0);

  // All-background perfect prediction.
  const LossResult empty =
      seg2f::focal_tversky(one_pixel(RasterKind::kLabel, 0.0),
                           one_pixel(RasterKind::kConfidence, 0.0));
  CHECK(empty.loss == 0.0);
  CHECK(empty.grad.at(0, 0) == 0.0);
}

TEST_CASE("combined loss is ce plus alpha tversky") {
  Rng rng(21);
  const auto b = random_batch(rng, 6, 7);
  LossParams params;
  const LossResult ce = seg2f::weighted_cross_entropy(b.y, b.yhat, b.w, params);
  const LossResult ftl = seg2f::focal_tversky(b.y, b.yhat, params);
  const LossResult both = seg2f::combined_loss(b.y, b.yhat, b.w, params);
  CHECK(both.loss ==
        doctest::Approx(ce.loss + params.alpha * ftl.loss).epsilon(1e-12));
  for (std::size_t i = 0; i < both.grad.size(); ++i) {
    const double expect =
        ce.grad.values()[i] + params.alpha * ftl.grad.values()[i];
    CHECK(both.grad.values()[i] == doctest::Approx(expect).epsilon(1e-12));
  }

  // Single-pixel frozen value: ln 2 + 0.5 * tversky(1, 0.5).
  const LossResult one = seg2f::combined_loss(
      one_pixel(RasterKind::kLabel, 1.0),
      one_pixel(RasterKind::kConfidence, 0.5),
      one_pixel(RasterKind::kWeight, 1.0));
  CHECK(one.loss == doctest::Approx(0.8508681529309428).epsilon(1e-13));
}

TEST_CASE("mixup blends images only") {
  Raster a(RasterKind::kImageChannel, 2, 2, 0.0);
  Raster b(RasterKind::kImageChannel, 2, 2, 1.0);
  const auto blended = seg2f::mixup_blend({a}, {b}, 0.05);
  REQUIRE(blended.size() == 1);
  for (double v : blended[0].values())
    CHECK(v == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("mixup cross-entropy is the lambda-weighted sum") {
  Rng rng(22);
  const auto b1 = random_batch(rng, 5, 5);
  const auto b2 = random_batch(rng, 5, 5);
  const double lambda = 0.05;
  const LossResult mixed = seg2f::mixup_cross_entropy(
      b1.y, b1.w, b2.y, b2.w, b1.yhat, lambda);
  const LossResult ce1 = seg2f::weighted_cross_entropy(b1.y, b1.yhat, b1.w);
  const LossResult ce2 = seg2f::weighted_cross_entropy(b2.y, b1.yhat, b2.w);
  CHECK(mixed.loss ==
        doctest::Approx(lambda * ce1.loss + (1.0 - lambda) * ce2.loss)
            .epsilon(1e-12));
  for (std::size_t i = 0; i < mixed.grad.size(); ++i) {
    const double expect = lambda * ce1.grad.values()[i] +
                          (1.0 - lambda) * ce2.grad.values()[i];
    CHECK(mixed.grad.values()[i] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("focal kl fixtures") {
  const Raster pt = one_pixel(RasterKind::kConfidence, 0.9);
  const Raster ps = one_pixel(RasterKind::kConfidence, 0.5);
  const Raster w = one_pixel(RasterKind::kWeight, 1.0);
  const LossResult r = seg2f::focal_kl(pt, ps, w);
  CHECK(r.loss == doctest::Approx(0.2741799033037029).epsilon(1e-13));
  CHECK(std::fabs(r.loss - 0.27419) < 1e-4);

  // Teacher equals student: zero loss, zero gradient.
  const LossResult same = seg2f::focal_kl(pt, pt, w);
  CHECK(same.loss == 0.0);
  CHECK(same.grad.at(0, 0) == 0.0);
}

TEST_CASE("focal kl is nonnegative and weight-linear") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Raster pt(RasterKind::kConfidence, 4, 4);
    Raster ps(RasterKind::kConfidence, 4, 4);
    Raster w(RasterKind::kWeight, 4, 4);
    for (int i = 0; i < 16; ++i) {
      pt.values()[i] = rng.next_double();
      ps.values()[i] = rng.next_double();
      w.values()[i] = rng.uniform(0.0, 4.0);
    }
    const LossResult r = seg2f::focal_kl(pt, ps, w);
    CHECK(r.loss >= 0.0);
    Raster w2 = w;
    for (auto& v : w2.values()) v *= 3.0;
    const LossResult r3 = seg2f::focal_kl(pt, ps, w2);
    CHECK(r3.loss == doctest::Approx(3.0 * r.loss).epsilon(1e-12));
  }
}

TEST_CASE("gradient suite stays under tolerance") {
  const auto reports = seg2f::run_gradient_suite(99, 4, 24);
  REQUIRE(reports.size() == 5);
  bool saw_ce = false, saw_ftl = false, saw_combined = false, saw_mix = false,
       saw_kl = false;
  for (const auto& rep : reports) {
    CHECK(rep.max_rel_err <= 1e-4);
    CHECK(rep.trials == 4);
    saw_ce = saw_ce || rep.loss_name == "weighted_cross_entropy";
    saw_ftl = saw_ftl || rep.loss_name == "focal_tversky";
    saw_combined = saw_combined || rep.loss_name == "combined";
    saw_mix = saw_mix || rep.loss_name == "mixup_cross_entropy";
    saw_kl = saw_kl || rep.loss_name == "focal_kl";
  }
  CHECK(saw_ce);
  CHECK(saw_ftl);
  CHECK(saw_combined);
  CHECK(saw_mix);
  CHECK(saw_kl);
}
