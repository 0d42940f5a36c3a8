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

#ifndef SEG2F_SRC_DETAIL_HPP_
#define SEG2F_SRC_DETAIL_HPP_

#include <charconv>
#include <string>

#include "seg2f/raster.hpp"

namespace seg2f::detail {

// 4-connected component labeling over nonzero pixels, ids 1..K assigned in
// first-encounter raster order. With match_value, neighbors only connect
// when they hold the same value (so abutting regions of different classes
// stay separate instances).
Raster label_components(const Raster& src, bool match_value, int* count);

// Exact squared Euclidean distance transform to the nonzero pixels of the
// indicator (two-pass lower envelope of parabolas). On an integer grid the
// squared distances are exact integers. Pixels of an all-zero indicator
// get +infinity.
void squared_edt(const std::vector<std::uint8_t>& indicator, int height,
                 int width, std::vector<double>* dist2);

// Shortest-round-trip decimal formatting ('.' decimal point regardless of
// locale). Integral values keep a trailing ".0" so the text stays
// recognizably floating point.
std::string format_double(double v);

}  // namespace seg2f::detail

#endif  // SEG2F_SRC_DETAIL_HPP_
