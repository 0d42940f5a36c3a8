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

#include "kernels_internal.hpp"

#if (defined(__x86_64__) || defined(__i386__)) && defined(__AVX2__)

#include <immintrin.h>

#include <cmath>
#include <cstring>

#include "vec_math_avx2.hpp"

namespace seg2f::kernels {
namespace {

using detail::vd_neg;
using detail::vexp_pd;
using detail::vexpm1_pd;
using detail::vlog_pd;

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  const __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

void a_threshold_ge(const double* x, std::size_t n, double threshold,
                    double* out) {
  const __m256d vt = _mm256_set1_pd(threshold);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d mask = _mm256_cmp_pd(v, vt, _CMP_GE_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(mask, one));
  }
  for (; i < n; ++i) out[i] = x[i] >= threshold ? 1.0 : 0.0;
}

void a_blend(const double* a, const double* b, std::size_t n, double wa,
             double wb, double* out) {
  const __m256d va = _mm256_set1_pd(wa);
  const __m256d vb = _mm256_set1_pd(wb);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d pa = _mm256_mul_pd(va, _mm256_loadu_pd(a + i));
    const __m256d pb = _mm256_mul_pd(vb, _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(pa, pb));
  }
  for (; i < n; ++i) out[i] = wa * a[i] + wb * b[i];
}

void a_affine(const double* x, std::size_t n, double mul, double add,
              double* out) {
  const __m256d vm = _mm256_set1_pd(mul);
  const __m256d va = _mm256_set1_pd(add);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_mul_pd(vm, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(va, v));
  }
  for (; i < n; ++i) out[i] = add + mul * x[i];
}

void a_clamp(const double* x, std::size_t n, double lo, double hi,
             double* out) {
  const __m256d vlo = _mm256_set1_pd(lo);
  const __m256d vhi = _mm256_set1_pd(hi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(out + i,
                     _mm256_min_pd(_mm256_max_pd(v, vlo), vhi));
  }
  for (; i < n; ++i) out[i] = std::min(std::max(x[i], lo), hi);
}

void a_axpy_u8(const std::uint8_t* counts, std::size_t n, double w,
               double* acc) {
  const __m256d vw = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    std::uint32_t packed;
    std::memcpy(&packed, counts + i, 4);
    const __m128i bytes = _mm_cvtsi32_si128(static_cast<int>(packed));
    const __m256d c = _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(bytes));
    const __m256d a = _mm256_loadu_pd(acc + i);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(a, _mm256_mul_pd(vw, c)));
  }
  for (; i < n; ++i)
    acc[i] = acc[i] + w * static_cast<double>(counts[i]);
}

double a_weighted_ce(const double* y, const double* yhat, const double* w,
                     std::size_t n, double eps, double* grad) {
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vome = _mm256_set1_pd(1.0 - eps);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yy = _mm256_loadu_pd(y + i);
    const __m256d p = _mm256_loadu_pd(yhat + i);
    const __m256d ww = _mm256_loadu_pd(w + i);
    const __m256d fg = _mm256_cmp_pd(yy, zero, _CMP_NEQ_OQ);
    __m256d parg = _mm256_blendv_pd(_mm256_sub_pd(one, p), p, fg);
    parg = _mm256_max_pd(parg, veps);
    const __m256d term = vd_neg(vlog_pd(parg));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(ww, term));
    if (grad) {
      const __m256d inside =
          _mm256_and_pd(_mm256_cmp_pd(p, veps, _CMP_GE_OQ),
                        _mm256_cmp_pd(p, vome, _CMP_LE_OQ));
      const __m256d num = _mm256_mul_pd(ww, _mm256_sub_pd(p, yy));
      const __m256d den = _mm256_mul_pd(p, _mm256_sub_pd(one, p));
      const __m256d g = _mm256_div_pd(num, den);
      _mm256_storeu_pd(grad + i, _mm256_and_pd(g, inside));
    }
  }
  double sum = hsum(acc);
  for (; i < n; ++i)
    sum += detail::ce_element(y[i], yhat[i], w[i], eps,
                              grad ? grad + i : nullptr);
  return sum;
}

void a_tversky_sums(const double* y, const double* yhat, std::size_t n,
                    double* sum_yy, double* sum_y, double* sum_yh) {
  __m256d ayy = _mm256_setzero_pd();
  __m256d ay = _mm256_setzero_pd();
  __m256d ayh = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yy = _mm256_loadu_pd(y + i);
    const __m256d p = _mm256_loadu_pd(yhat + i);
    ayy = _mm256_add_pd(ayy, _mm256_mul_pd(yy, p));
    ay = _mm256_add_pd(ay, yy);
    ayh = _mm256_add_pd(ayh, p);
  }
  double syy = hsum(ayy), sy = hsum(ay), syh = hsum(ayh);
  for (; i < n; ++i) {
    syy += y[i] * yhat[i];
    sy += y[i];
    syh += yhat[i];
  }
  *sum_yy = syy;
  *sum_y = sy;
  *sum_yh = syh;
}

double a_focal_kl(const double* pt, const double* ps, const double* w,
                  std::size_t n, double gamma, double* grad) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vgamma = _mm256_set1_pd(gamma);
  const __m256d vgm1 = _mm256_set1_pd(gamma - 1.0);
  const __m256d cutoff = _mm256_set1_pd(1e-12);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_loadu_pd(pt + i);
    const __m256d s = _mm256_loadu_pd(ps + i);
    const __m256d ww = _mm256_loadu_pd(w + i);
    const __m256d onet = _mm256_sub_pd(one, t);
    const __m256d ones = _mm256_sub_pd(one, s);
    const __m256d l1 = vlog_pd(_mm256_div_pd(t, s));
    const __m256d l2 = vlog_pd(_mm256_div_pd(onet, ones));
    const __m256d kl =
        _mm256_add_pd(_mm256_mul_pd(t, l1), _mm256_mul_pd(onet, l2));
    const __m256d active = _mm256_cmp_pd(kl, cutoff, _CMP_GE_OQ);
    const __m256d negkl = vd_neg(kl);
    const __m256d e = vexp_pd(negkl);
    const __m256d m = vd_neg(vexpm1_pd(negkl));
    const __m256d lnm = vlog_pd(m);
    const __m256d mg = vexp_pd(_mm256_mul_pd(vgamma, lnm));
    __m256d loss = _mm256_mul_pd(ww, _mm256_mul_pd(mg, kl));
    acc = _mm256_add_pd(acc, _mm256_and_pd(loss, active));
    if (grad) {
      const __m256d dkl = _mm256_add_pd(vd_neg(_mm256_div_pd(t, s)),
                                        _mm256_div_pd(onet, ones));
      const __m256d mgm1 = vexp_pd(_mm256_mul_pd(vgm1, lnm));
      const __m256d lead = _mm256_mul_pd(
          _mm256_mul_pd(_mm256_mul_pd(vgamma, mgm1), e), kl);
      const __m256d factor = _mm256_add_pd(lead, mg);
      const __m256d g = _mm256_mul_pd(ww, _mm256_mul_pd(factor, dkl));
      _mm256_storeu_pd(grad + i, _mm256_and_pd(g, active));
    }
  }
  double sum = hsum(acc);
  for (; i < n; ++i)
    sum += detail::focal_kl_element(pt[i], ps[i], w[i], gamma,
                                    grad ? grad + i : nullptr);
  return sum;
}

void a_exp_neg_scaled(const double* x, std::size_t n, double scale,
                      double* out) {
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d arg = vd_neg(_mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(out + i, vexp_pd(arg));
  }
  for (; i < n; ++i) out[i] = std::exp(-(scale * x[i]));
}

constexpr Ops kAvx2Ops = {
    a_threshold_ge, a_blend,        a_affine,   a_clamp,          a_axpy_u8,
    a_weighted_ce,  a_tversky_sums, a_focal_kl, a_exp_neg_scaled,
};

}  // namespace

namespace detail {
const Ops* avx2_ops() { return &kAvx2Ops; }
}  // namespace detail

}  // namespace seg2f::kernels

#else  // build without AVX2 support

namespace seg2f::kernels::detail {
const Ops* avx2_ops() { return nullptr; }
}  // namespace seg2f::kernels::detail

#endif
