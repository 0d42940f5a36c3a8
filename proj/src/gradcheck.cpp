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

#include "seg2f/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "seg2f/loss.hpp"
#include "seg2f/parallel.hpp"
#include "seg2f/rng.hpp"

namespace seg2f {
namespace {

struct Fixture {
  Raster y, y2, yhat, pt, w, wy, wy2;
};

Fixture make_fixture(Rng& rng, int size) {
  Fixture f{Raster(RasterKind::kLabel, size, size, 0.0),
            Raster(RasterKind::kLabel, size, size, 0.0),
            Raster(RasterKind::kConfidence, size, size, 0.0),
            Raster(RasterKind::kConfidence, size, size, 0.0),
            Raster(RasterKind::kWeight, size, size, 0.0),
            Raster(RasterKind::kWeight, size, size, 0.0),
            Raster(RasterKind::kWeight, size, size, 0.0)};
  for (std::size_t i = 0; i < f.y.size(); ++i) {
    f.y.data()[i] = rng.next_double() < 0.5 ? 0.0 : 1.0;
    f.y2.data()[i] = rng.next_double() < 0.5 ? 0.0 : 1.0;
    f.yhat.data()[i] = rng.uniform(0.05, 0.95);
    f.pt.data()[i] = rng.uniform(0.05, 0.95);
    f.w.data()[i] = rng.uniform(0.25, 4.0);
    f.wy.data()[i] = rng.uniform(0.25, 4.0);
    f.wy2.data()[i] = rng.uniform(0.25, 4.0);
  }
  return f;
}

struct LossUnderTest {
  const char* name;
  // Loss value at the given prediction raster.
  std::function<double(const Fixture&, const Raster&)> value;
  // Analytical gradient with respect to the prediction.
  std::function<Raster(const Fixture&)> grad;
};

double check_one(const LossUnderTest& loss, const Fixture& f) {
  const Raster analytic = loss.grad(f);
  Raster probe = f.yhat;

  const double h = 1e-5;
  double max_diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i)
    scale = std::max(scale, std::fabs(analytic.data()[i]));
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double saved = probe.data()[i];
    probe.data()[i] = saved + h;
    const double up = loss.value(f, probe);
    probe.data()[i] = saved - h;
    const double down = loss.value(f, probe);
    probe.data()[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    scale = std::max(scale, std::fabs(fd));
    max_diff = std::max(max_diff, std::fabs(fd - analytic.data()[i]));
  }
  return max_diff / std::max(scale, 1e-6);
}

}  // namespace

std::vector<GradCheckReport> run_gradient_suite(std::uint64_t seed, int trials,
                                                int size) {
  if (trials < 1) throw ValidationError("gradient suite needs trials >= 1");
  if (size < 1) throw ValidationError("gradient suite needs size >= 1");

  const LossParams params;
  const std::vector<LossUnderTest> losses = {
      {"weighted_cross_entropy",
       [&](const Fixture& f, const Raster& p) {
         return weighted_cross_entropy(f.y, p, f.w, params).loss;
       },
       [&](const Fixture& f) {
         return weighted_cross_entropy(f.y, f.yhat, f.w, params).grad;
       }},
      {"focal_tversky",
       [&](const Fixture& f, const Raster& p) {
         return focal_tversky(f.y, p, params).loss;
       },
       [&](const Fixture& f) {
         return focal_tversky(f.y, f.yhat, params).grad;
       }},
      {"combined",
       [&](const Fixture& f, const Raster& p) {
         return combined_loss(f.y, p, f.w, params).loss;
       },
       [&](const Fixture& f) {
         return combined_loss(f.y, f.yhat, f.w, params).grad;
       }},
      {"mixup_cross_entropy",
       [&](const Fixture& f, const Raster& p) {
         return mixup_cross_entropy(f.y, f.wy, f.y2, f.wy2, p,
                                    params.lambda, params)
             .loss;
       },
       [&](const Fixture& f) {
         return mixup_cross_entropy(f.y, f.wy, f.y2, f.wy2, f.yhat,
                                    params.lambda, params)
             .grad;
       }},
      {"focal_kl",
       [&](const Fixture& f, const Raster& p) {
         return focal_kl(f.pt, p, f.w, params).loss;
       },
       [&](const Fixture& f) {
         return focal_kl(f.pt, f.yhat, f.w, params).grad;
       }},
  };

  // errs[trial][loss]; trials are independent, combined by max, so the
  // outcome does not depend on scheduling.
  std::vector<std::vector<double>> errs(
      trials, std::vector<double>(losses.size(), 0.0));
  parallel_for(static_cast<std::size_t>(trials),
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t t = begin; t < end; ++t) {
                   Rng rng = Rng(seed).fork(t);
                   const Fixture f = make_fixture(rng, size);
                   for (std::size_t l = 0; l < losses.size(); ++l)
                     errs[t][l] = check_one(losses[l], f);
                 }
               });

  std::vector<GradCheckReport> reports;
  reports.reserve(losses.size());
  for (std::size_t l = 0; l < losses.size(); ++l) {
    GradCheckReport rep;
    rep.loss_name = losses[l].name;
    rep.trials = trials;
    for (int t = 0; t < trials; ++t)
      rep.max_rel_err = std::max(rep.max_rel_err, errs[t][l]);
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace seg2f
