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

#include "seg2f/augment.hpp"

#include <algorithm>
#include <cmath>

#include "seg2f/kernels.hpp"

namespace seg2f {
namespace {

Raster rot90ccw(const Raster& in) {
  Raster out(in.kind(), in.width(), in.height(), 0.0);
  const int w_in = in.width();
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x)
      out.at(y, x) = in.at(x, w_in - 1 - y);
  return out;
}

Raster mirror_h(const Raster& in) {
  Raster out(in.kind(), in.height(), in.width(), 0.0);
  const int w_in = in.width();
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x) out.at(y, x) = in.at(y, w_in - 1 - x);
  return out;
}

void require_index(int k) {
  if (k < 0 || k > 7)
    throw ValidationError("dihedral index must be in 0..7");
}

// Hue shift in turns on one RGB pixel, via HSV round trip.
void shift_hue(double* r, double* g, double* b, double turns) {
  const double mx = std::max({*r, *g, *b});
  const double mn = std::min({*r, *g, *b});
  const double delta = mx - mn;
  if (delta == 0.0) return;  // gray pixels carry no hue

  double h;
  if (mx == *r)
    h = std::fmod((*g - *b) / delta, 6.0);
  else if (mx == *g)
    h = (*b - *r) / delta + 2.0;
  else
    h = (*r - *g) / delta + 4.0;
  h /= 6.0;
  h += turns;
  h -= std::floor(h);  // wrap to [0, 1)

  const double s = mx == 0.0 ? 0.0 : delta / mx;
  const double v = mx;
  const double hh = h * 6.0;
  const int sector = std::min(5, static_cast<int>(std::floor(hh)));
  const double f = hh - sector;
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * f);
  const double t = v * (1.0 - s * (1.0 - f));
  switch (sector) {
    case 0: *r = v; *g = t; *b = p; break;
    case 1: *r = q; *g = v; *b = p; break;
    case 2: *r = p; *g = v; *b = t; break;
    case 3: *r = p; *g = q; *b = v; break;
    case 4: *r = t; *g = p; *b = v; break;
    default: *r = v; *g = p; *b = q; break;
  }
}

}  // namespace

Raster dihedral(const Raster& raster, int k) {
  require_index(k);
  Raster out = k >= 4 ? mirror_h(raster) : raster;
  for (int rot = k % 4; rot > 0; --rot) out = rot90ccw(out);
  return out;
}

Sample dihedral(const Sample& sample, int k) {
  Sample out;
  out.image.reserve(sample.image.size());
  for (const Raster& channel : sample.image)
    out.image.push_back(dihedral(channel, k));
  out.labels = dihedral(sample.labels, k);
  out.weights = dihedral(sample.weights, k);
  return out;
}

Raster dihedral_inverse(const Raster& raster, int k) {
  require_index(k);
  // Pure rotations invert by the complementary rotation; the mirrored
  // elements are involutions.
  return dihedral(raster, k < 4 ? (4 - k) % 4 : k);
}

Sample random_crop(const Sample& sample, int out_h, int out_w, Rng& rng) {
  const int h = sample.labels.height();
  const int w = sample.labels.width();
  if (out_h < 1 || out_w < 1 || out_h > h || out_w > w)
    throw ValidationError("random_crop: output size must fit the sample");

  const int oy = static_cast<int>(rng.bounded(h - out_h + 1));
  const int ox = static_cast<int>(rng.bounded(w - out_w + 1));

  const auto crop = [&](const Raster& r) {
    Raster out(r.kind(), out_h, out_w, 0.0);
    for (int y = 0; y < out_h; ++y)
      for (int x = 0; x < out_w; ++x) out.at(y, x) = r.at(oy + y, ox + x);
    return out;
  };

  Sample out;
  out.image.reserve(sample.image.size());
  for (const Raster& channel : sample.image) {
    if (!channel.same_shape(sample.labels))
      throw ValidationError("random_crop: channel shape mismatch");
    out.image.push_back(crop(channel));
  }
  out.labels = crop(sample.labels);
  out.weights = crop(sample.weights);
  return out;
}

std::vector<Raster> color_jitter(const std::vector<Raster>& image,
                                 const JitterMagnitudes& magnitudes,
                                 Rng& rng) {
  if (image.size() != 3)
    throw ValidationError("color_jitter expects 3 channels");
  for (const Raster& c : image)
    if (!c.same_shape(image[0]))
      throw ValidationError("color_jitter: channel shape mismatch");
  for (const double m : {magnitudes.brightness, magnitudes.contrast,
                         magnitudes.saturation, magnitudes.hue})
    if (!(m >= 0.0) || m >= 1.0)
      throw ValidationError("jitter magnitudes must be in [0, 1)");

  // Factor draw order is part of the contract: brightness, contrast,
  // saturation, then hue.
  const double fb = rng.uniform(1.0 - magnitudes.brightness,
                                1.0 + magnitudes.brightness);
  const double fc = rng.uniform(1.0 - magnitudes.contrast,
                                1.0 + magnitudes.contrast);
  const double fs = rng.uniform(1.0 - magnitudes.saturation,
                                1.0 + magnitudes.saturation);
  const double fh = rng.uniform(-magnitudes.hue, magnitudes.hue);

  const std::size_t n = image[0].size();
  std::vector<Raster> out = image;
  const auto& k = kernels::ops();

  // Brightness scales everything.
  for (Raster& c : out) k.affine(c.data(), n, fb, 0.0, c.data());

  // Contrast scales the deviation from the image's gray mean.
  double mean = 0.0;
  for (const Raster& c : out)
    for (const double v : c.values()) mean += v;
  mean /= static_cast<double>(3 * n);
  for (Raster& c : out)
    k.affine(c.data(), n, fc, (1.0 - fc) * mean, c.data());

  // Saturation blends each pixel with its luma.
  std::vector<double> luma(n);
  for (std::size_t i = 0; i < n; ++i)
    luma[i] = 0.299 * out[0].data()[i] + 0.587 * out[1].data()[i] +
              0.114 * out[2].data()[i];
  for (Raster& c : out) k.blend(c.data(), luma.data(), n, fs, 1.0 - fs, c.data());

  // Hue rotates per pixel; clamp first so HSV sees sane values. A zero
  // shift is skipped entirely: the HSV round trip is not bit-exact, and
  // zero-magnitude jitter must be a no-op.
  for (Raster& c : out) k.clamp(c.data(), n, 0.0, 1.0, c.data());
  if (fh != 0.0)
    for (std::size_t i = 0; i < n; ++i)
      shift_hue(&out[0].data()[i], &out[1].data()[i], &out[2].data()[i], fh);
  for (Raster& c : out) k.clamp(c.data(), n, 0.0, 1.0, c.data());
  return out;
}

Sample black_mask(const Sample& sample, double max_fraction, Rng& rng) {
  if (!(max_fraction >= 0.0) || max_fraction > 1.0)
    throw ValidationError("black_mask: max_fraction must be in [0, 1]");
  const int h = sample.labels.height();
  const int w = sample.labels.width();

  Sample out = sample;
  // Draw order: edge, then depth.
  const int side = static_cast<int>(rng.bounded(4));
  const int extent = (side < 2) ? h : w;
  const int max_depth =
      static_cast<int>(std::floor(max_fraction * extent));
  if (max_depth < 1) return out;
  const int depth = 1 + static_cast<int>(rng.bounded(max_depth));

  const auto zero = [&](Raster& r) {
    if (!r.same_shape(sample.labels))
      throw ValidationError("black_mask: shape mismatch");
    int y0 = 0, y1 = h, x0 = 0, x1 = w;
    switch (side) {
      case 0: y1 = depth; break;
      case 1: y0 = h - depth; break;
      case 2: x1 = depth; break;
      default: x0 = w - depth; break;
    }
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) r.at(y, x) = 0.0;
  };

  for (Raster& channel : out.image) zero(channel);
  zero(out.weights);
  return out;
}

}  // namespace seg2f
