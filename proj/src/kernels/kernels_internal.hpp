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

#ifndef SEG2F_SRC_KERNELS_KERNELS_INTERNAL_HPP_
#define SEG2F_SRC_KERNELS_KERNELS_INTERNAL_HPP_

#include <algorithm>
#include <cmath>

#include "seg2f/kernels.hpp"

namespace seg2f::kernels::detail {

// Null when this build cannot carry AVX2 code at all. CPU support is
// checked separately by backend_supported().
const Ops* avx2_ops();

// Per-element loss math, shared by the scalar backend and the vector
// backends' remainder loops so the semantics exist in exactly one place.

inline double ce_element(double y, double p, double w, double eps,
                         double* grad) {
  const double term = y != 0.0 ? -std::log(std::max(p, eps))
                               : -std::log(std::max(1.0 - p, eps));
  if (grad) {
    double g = 0.0;
    if (p >= eps && p <= 1.0 - eps) {
      const double num = w * (p - y);
      const double den = p * (1.0 - p);
      g = num / den;
    }
    *grad = g;
  }
  return w * term;
}

inline double focal_kl_element(double t, double s, double w, double gamma,
                               double* grad) {
  const double kl =
      t * std::log(t / s) + (1.0 - t) * std::log((1.0 - t) / (1.0 - s));
  if (!(kl >= 1e-12)) {
    if (grad) *grad = 0.0;
    return 0.0;
  }
  const double e = std::exp(-kl);
  const double m = -std::expm1(-kl);
  const double mg = std::pow(m, gamma);
  if (grad) {
    const double dkl = -t / s + (1.0 - t) / (1.0 - s);
    const double factor = gamma * std::pow(m, gamma - 1.0) * e * kl + mg;
    *grad = w * factor * dkl;
  }
  return w * mg * kl;
}

}  // namespace seg2f::kernels::detail

#endif  // SEG2F_SRC_KERNELS_KERNELS_INTERNAL_HPP_
