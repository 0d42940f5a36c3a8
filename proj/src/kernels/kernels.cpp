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

#include "seg2f/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"
#include "seg2f/errors.hpp"

namespace seg2f::kernels {
namespace {

void s_threshold_ge(const double* x, std::size_t n, double threshold,
                    double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] >= threshold ? 1.0 : 0.0;
}

void s_blend(const double* a, const double* b, std::size_t n, double wa,
             double wb, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = wa * a[i] + wb * b[i];
}

void s_affine(const double* x, std::size_t n, double mul, double add,
              double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = add + mul * x[i];
}

void s_clamp(const double* x, std::size_t n, double lo, double hi,
             double* out) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::min(std::max(x[i], lo), hi);
}

void s_axpy_u8(const std::uint8_t* counts, std::size_t n, double w,
               double* acc) {
  for (std::size_t i = 0; i < n; ++i)
    acc[i] = acc[i] + w * static_cast<double>(counts[i]);
}

double s_weighted_ce(const double* y, const double* yhat, const double* w,
                     std::size_t n, double eps, double* grad) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    sum += detail::ce_element(y[i], yhat[i], w[i], eps,
                              grad ? grad + i : nullptr);
  return sum;
}

void s_tversky_sums(const double* y, const double* yhat, std::size_t n,
                    double* sum_yy, double* sum_y, double* sum_yh) {
  double syy = 0.0, sy = 0.0, syh = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    syy += y[i] * yhat[i];
    sy += y[i];
    syh += yhat[i];
  }
  *sum_yy = syy;
  *sum_y = sy;
  *sum_yh = syh;
}

double s_focal_kl(const double* pt, const double* ps, const double* w,
                  std::size_t n, double gamma, double* grad) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    sum += detail::focal_kl_element(pt[i], ps[i], w[i], gamma,
                                    grad ? grad + i : nullptr);
  return sum;
}

void s_exp_neg_scaled(const double* x, std::size_t n, double scale,
                      double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(-(scale * x[i]));
}

constexpr Ops kScalarOps = {
    s_threshold_ge, s_blend,        s_affine,   s_clamp,          s_axpy_u8,
    s_weighted_ce,  s_tversky_sums, s_focal_kl, s_exp_neg_scaled,
};

Backend detect_backend() {
  if (const char* env = std::getenv("SEG2F_KERNELS")) {
    const std::string name(env);
    if (name == "scalar") return Backend::kScalar;
    if (name == "avx2") {
      if (!backend_supported(Backend::kAvx2))
        throw ValidationError("SEG2F_KERNELS=avx2 but AVX2 is unavailable");
      return Backend::kAvx2;
    }
    throw ValidationError("unknown SEG2F_KERNELS value: " + name);
  }
  return backend_supported(Backend::kAvx2) ? Backend::kAvx2
                                           : Backend::kScalar;
}

Backend& backend_slot() {
  static Backend backend = detect_backend();
  return backend;
}

}  // namespace

const char* backend_name(Backend backend) {
  return backend == Backend::kScalar ? "scalar" : "avx2";
}

bool backend_supported(Backend backend) {
  if (backend == Backend::kScalar) return true;
  if (detail::avx2_ops() == nullptr) return false;
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Backend active_backend() { return backend_slot(); }

void set_backend(Backend backend) {
  if (!backend_supported(backend))
    throw ValidationError(std::string("kernel backend not supported here: ") +
                          backend_name(backend));
  backend_slot() = backend;
}

const Ops& ops_for(Backend backend) {
  if (backend == Backend::kScalar) return kScalarOps;
  if (!backend_supported(backend))
    throw ValidationError("kernel backend not supported here: avx2");
  return *detail::avx2_ops();
}

const Ops& ops() { return ops_for(active_backend()); }

}  // namespace seg2f::kernels
