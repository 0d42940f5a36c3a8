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

#include "seg2f/label_prep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "detail.hpp"
#include "seg2f/kernels.hpp"

namespace seg2f {
namespace {

void require_binary(const Raster& r, const char* what) {
  for (const double v : r.values())
    if (v != 0.0 && v != 1.0)
      throw ValidationError(std::string(what) + " must be binary");
}

void require_labels(const Raster& r) {
  for (const double v : r.values())
    if (v != 0.0 && v != 1.0 && v != 2.0)
      throw ValidationError("label raster values must be 0, 1 or 2");
}

void require_same_shape(const Raster& a, const Raster& b, const char* what) {
  if (!a.same_shape(b))
    throw ValidationError(std::string(what) + ": shape mismatch");
}

bool neighborhood_all(const Raster& r, int y, int x,
                      const std::function<bool(double)>& pred) {
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      const int ny = y + dy;
      const int nx = x + dx;
      if (!r.in_bounds(ny, nx)) return false;
      if (!pred(r.at(ny, nx))) return false;
    }
  }
  return true;
}

}  // namespace

Raster morph(const Raster& mask, MorphOp op) {
  require_binary(mask, "morphology input");
  Raster out(mask.kind(), mask.height(), mask.width(), 0.0);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (op == MorphOp::kErode) {
        out.at(y, x) = neighborhood_all(mask, y, x,
                                        [](double v) { return v != 0.0; })
                           ? 1.0
                           : 0.0;
      } else {
        bool any = false;
        for (int dy = -1; dy <= 1 && !any; ++dy)
          for (int dx = -1; dx <= 1 && !any; ++dx)
            any = mask.in_bounds(y + dy, x + dx) &&
                  mask.at(y + dy, x + dx) != 0.0;
        out.at(y, x) = any ? 1.0 : 0.0;
      }
    }
  }
  return out;
}

Raster erode_instances(const Raster& labels) {
  int count = 0;
  const Raster instances = detail::label_components(labels, true, &count);
  return erode_instances(labels, instances);
}

Raster erode_instances(const Raster& labels, const Raster& instances) {
  require_labels(labels);
  require_same_shape(labels, instances, "erode_instances");
  Raster out(RasterKind::kLabel, labels.height(), labels.width(), 0.0);
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      if (labels.at(y, x) == 0.0) continue;
      const double id = instances.at(y, x);
      const bool keep = neighborhood_all(
          instances, y, x, [id](double v) { return v == id; });
      if (keep) out.at(y, x) = labels.at(y, x);
    }
  }
  return out;
}

RemappedLabels remap_dense(const Raster& labels, DenseRemap mode) {
  require_labels(labels);
  RemappedLabels out{
      Raster(RasterKind::kLabel, labels.height(), labels.width(), 0.0),
      Raster(RasterKind::kLabel, labels.height(), labels.width(), 0.0)};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double v = labels.data()[i];
    if (v == 1.0) {
      out.labels.data()[i] = 1.0;
    } else if (v == 2.0) {
      if (mode == DenseRemap::kToBuilding)
        out.labels.data()[i] = 1.0;
      else
        out.ignore.data()[i] = 1.0;
    }
  }
  return out;
}

Raster edge_image(const Raster& labels) {
  int count = 0;
  const Raster instances = detail::label_components(labels, true, &count);
  return edge_image(labels, instances);
}

Raster edge_image(const Raster& labels, const Raster& instances) {
  require_labels(labels);
  require_same_shape(labels, instances, "edge_image");
  Raster out(RasterKind::kLabel, labels.height(), labels.width(), 0.0);
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      if (labels.at(y, x) == 0.0) continue;
      const double cls = labels.at(y, x);
      const double id = instances.at(y, x);
      bool edge = false;
      const int ny[4] = {y - 1, y + 1, y, y};
      const int nx[4] = {x, x, x - 1, x + 1};
      for (int k = 0; k < 4 && !edge; ++k) {
        if (!labels.in_bounds(ny[k], nx[k])) {
          edge = true;
        } else {
          const double ncls = labels.at(ny[k], nx[k]);
          const double nid = instances.at(ny[k], nx[k]);
          edge = ncls == 0.0 || ncls != cls || nid != id;
        }
      }
      if (edge) out.at(y, x) = 1.0;
    }
  }
  return out;
}

Raster gaussian_edge_weights(const Raster& edges,
                             const GaussianWeightParams& params) {
  require_binary(edges, "edge image");
  if (params.sigma <= 0.0)
    throw ValidationError("gaussian_edge_weights: sigma must be positive");

  const int r = static_cast<int>(std::ceil(3.0 * params.sigma));
  const double inv2s2 = 1.0 / (2.0 * params.sigma * params.sigma);

  // Unnormalized taps and the full-square normalizer, accumulated per
  // symmetry orbit so every orientation sums the same terms.
  const auto tap = [&](int a, int b) {
    return std::exp(-(static_cast<double>(a) * a + static_cast<double>(b) * b) *
                    inv2s2);
  };
  double z = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) z += tap(std::abs(dx), std::abs(dy));

  const int h = edges.height();
  const int w = edges.width();
  const std::size_t n = edges.size();
  std::vector<std::uint8_t> e(n);
  for (std::size_t i = 0; i < n; ++i)
    e[i] = edges.data()[i] != 0.0 ? 1 : 0;

  // The convolution runs orbit by orbit: all taps with |offsets| {a, b}
  // share one coefficient, so their edge-pixel count per output pixel is
  // an exact small integer. Accumulating coefficient * count in a fixed
  // orbit order makes the result invariant under the square's symmetries.
  std::vector<double> acc(n, 0.0);
  std::vector<std::uint8_t> counts(n);
  const auto& k = kernels::ops();
  for (int b = 0; b <= r; ++b) {
    for (int a = 0; a <= b; ++a) {
      std::set<std::pair<int, int>> offsets;
      for (const int sa : {-1, 1}) {
        for (const int sb : {-1, 1}) {
          offsets.insert({sa * a, sb * b});
          offsets.insert({sb * b, sa * a});
        }
      }
      std::fill(counts.begin(), counts.end(), 0);
      for (const auto& [dx, dy] : offsets) {
        const int y_lo = std::max(0, -dy);
        const int y_hi = h - std::max(0, dy);  // exclusive
        const int x_lo = std::max(0, -dx);
        const int x_hi = w - std::max(0, dx);
        for (int y = y_lo; y < y_hi; ++y) {
          std::uint8_t* crow = counts.data() + static_cast<std::size_t>(y) * w;
          const std::uint8_t* erow =
              e.data() + static_cast<std::size_t>(y + dy) * w + dx;
          for (int x = x_lo; x < x_hi; ++x) crow[x] += erow[x];
        }
      }
      k.axpy_u8(counts.data(), n, tap(a, b) / z, acc.data());
    }
  }

  Raster out(RasterKind::kWeight, h, w, 0.0);
  k.affine(acc.data(), n, params.scale, params.floor, out.data());
  return out;
}

Raster unet_distance_weights(const Raster& labels, double sigma) {
  int count = 0;
  const Raster instances = detail::label_components(labels, true, &count);
  return unet_distance_weights(labels, instances, sigma);
}

Raster unet_distance_weights(const Raster& labels, const Raster& instances,
                             double sigma) {
  require_labels(labels);
  require_same_shape(labels, instances, "unet_distance_weights");
  if (sigma <= 0.0)
    throw ValidationError("unet_distance_weights: sigma must be positive");

  const int h = labels.height();
  const int w = labels.width();
  const std::size_t n = labels.size();

  int max_id = 0;
  for (const double v : instances.values())
    max_id = std::max(max_id, static_cast<int>(v));
  // Fewer than two instances: one of the two distances is +infinity
  // everywhere, so every weight is exp(-inf) = 0.
  Raster out(RasterKind::kWeight, h, w, 0.0);
  if (max_id < 2) return out;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d1(n, inf), d2(n, inf), dist2;
  std::vector<std::uint8_t> indicator(n);
  for (int id = 1; id <= max_id; ++id) {
    for (std::size_t i = 0; i < n; ++i)
      indicator[i] = instances.data()[i] == static_cast<double>(id) ? 1 : 0;
    detail::squared_edt(indicator, h, w, &dist2);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = dist2[i];
      if (d < d1[i]) {
        d2[i] = d1[i];
        d1[i] = d;
      } else if (d < d2[i]) {
        d2[i] = d;
      }
    }
  }

  // Squared distances are exact integers, so the per-pixel sums below are
  // reproducible across traversal orders and reflections.
  std::vector<double> sum(n);
  for (std::size_t i = 0; i < n; ++i)
    sum[i] = std::sqrt(d1[i]) + std::sqrt(d2[i]);
  kernels::ops().exp_neg_scaled(sum.data(), n, 1.0 / (2.0 * sigma * sigma),
                                out.data());
  return out;
}

}  // namespace seg2f
