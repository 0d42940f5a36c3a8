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

#include "detail.hpp"

#include <array>
#include <charconv>
#include <limits>
#include <vector>

namespace seg2f::detail {

Raster label_components(const Raster& src, bool match_value, int* count) {
  const int h = src.height();
  const int w = src.width();
  Raster ids(RasterKind::kInstanceId, h, w, 0.0);
  int next_id = 0;
  std::vector<std::size_t> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (src.at(y, x) == 0.0 || ids.at(y, x) != 0.0) continue;
      const double value = src.at(y, x);
      const double id = static_cast<double>(++next_id);
      ids.at(y, x) = id;
      stack.push_back(src.index(y, x));
      while (!stack.empty()) {
        const std::size_t p = stack.back();
        stack.pop_back();
        const int py = static_cast<int>(p / static_cast<std::size_t>(w));
        const int px = static_cast<int>(p % static_cast<std::size_t>(w));
        const std::array<std::array<int, 2>, 4> steps = {
            {{py - 1, px}, {py + 1, px}, {py, px - 1}, {py, px + 1}}};
        for (const auto& [ny, nx] : steps) {
          if (!src.in_bounds(ny, nx)) continue;
          if (ids.at(ny, nx) != 0.0) continue;
          const double v = src.at(ny, nx);
          if (v == 0.0) continue;
          if (match_value && v != value) continue;
          ids.at(ny, nx) = id;
          stack.push_back(src.index(ny, nx));
        }
      }
    }
  }
  if (count) *count = next_id;
  return ids;
}

namespace {

// Lower envelope of parabolas i -> (q - i)^2 + f[i] (one pass of the
// two-pass squared distance transform).
void edt_1d(const double* f, int n, double* out, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    if (f[q] == std::numeric_limits<double>::infinity()) {
      // A parabola at +inf never wins; skip it to keep the envelope
      // arithmetic finite.
      continue;
    }
    double s;
    for (;;) {
      const double fv = f[v[k]];
      if (fv == std::numeric_limits<double>::infinity()) {
        // Envelope so far is all-infinite; replace it.
        if (k == 0) {
          v[0] = q;
          z[1] = std::numeric_limits<double>::infinity();
          s = -std::numeric_limits<double>::infinity();
          break;
        }
        --k;
        continue;
      }
      s = ((f[q] + static_cast<double>(q) * q) -
           (fv + static_cast<double>(v[k]) * v[k])) /
          (2.0 * q - 2.0 * v[k]);
      if (s <= z[k]) {
        --k;
        continue;
      }
      break;
    }
    if (s == -std::numeric_limits<double>::infinity()) continue;
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double fv = f[v[k]];
    if (fv == std::numeric_limits<double>::infinity()) {
      out[q] = fv;
    } else {
      const double d = static_cast<double>(q) - static_cast<double>(v[k]);
      out[q] = d * d + fv;
    }
  }
}

}  // namespace

void squared_edt(const std::vector<std::uint8_t>& indicator, int height,
                 int width, std::vector<double>* dist2) {
  const double inf = std::numeric_limits<double>::infinity();
  dist2->assign(static_cast<std::size_t>(height) * width, inf);
  std::vector<double>& d = *dist2;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (indicator[i]) d[i] = 0.0;

  const int n = std::max(height, width);
  std::vector<double> f(n), out(n), z(n + 1);
  std::vector<int> v(n);

  // Columns first, then rows.
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) f[y] = d[static_cast<std::size_t>(y) * width + x];
    edt_1d(f.data(), height, out.data(), v.data(), z.data());
    for (int y = 0; y < height; ++y) d[static_cast<std::size_t>(y) * width + x] = out[y];
  }
  for (int y = 0; y < height; ++y) {
    double* row = d.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) f[x] = row[x];
    edt_1d(f.data(), width, out.data(), v.data(), z.data());
    for (int x = 0; x < width; ++x) row[x] = out[x];
  }
}

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), res.ptr);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
    s += ".0";
  return s;
}

}  // namespace seg2f::detail
