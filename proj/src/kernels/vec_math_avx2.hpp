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

#ifndef SEG2F_SRC_KERNELS_VEC_MATH_AVX2_HPP_
#define SEG2F_SRC_KERNELS_VEC_MATH_AVX2_HPP_

#include <immintrin.h>

#include <cstdint>

// 4-lane double-precision exp/log built from multiplies and adds only (no
// FMA anywhere in this project). Both stay within a few ulp of libm over
// the ranges the kernels feed them, which the scalar/AVX2 equivalence
// tests pin down.

namespace seg2f::kernels::detail {

inline __m256d vd_set1(double v) { return _mm256_set1_pd(v); }

inline __m256d vd_neg(__m256d x) {
  return _mm256_xor_pd(x, _mm256_set1_pd(-0.0));
}

// exp(x) with |error| of a few ulp for x in about [-708, 709]. Arguments
// at or below -708 flush to exactly 0, at or above 709.7 saturate to inf.
inline __m256d vexp_pd(__m256d x) {
  const __m256d log2e = vd_set1(1.44269504088896340736e+00);
  const __m256d ln2_hi = vd_set1(6.93147180369123816490e-01);
  const __m256d ln2_lo = vd_set1(1.90821492927058770002e-10);

  const __m256d x0 = x;
  x = _mm256_max_pd(_mm256_min_pd(x, vd_set1(709.0)), vd_set1(-745.0));

  const __m256d kd = _mm256_round_pd(
      _mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(kd, ln2_hi));
  r = _mm256_sub_pd(r, _mm256_mul_pd(kd, ln2_lo));

  // exp(r) = sum r^k / k!, k = 0..13, |r| <= ln2/2.
  __m256d p = vd_set1(1.6059043836821613e-10);
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(2.0876756987868098e-09));
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(2.5052108385441720e-08));
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(2.7557319223985888e-07));
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(2.7557319223985893e-06));
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(2.4801587301587302e-05));
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(1.9841269841269841e-04));
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(1.3888888888888889e-03));
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(8.3333333333333332e-03));
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(4.1666666666666664e-02));
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(1.6666666666666666e-01));
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(0.5));
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(1.0));
  p = _mm256_add_pd(_mm256_mul_pd(p, r), vd_set1(1.0));

  // Scale by 2^k through the exponent field.
  const __m128i k32 = _mm256_cvtpd_epi32(kd);
  const __m256i k64 = _mm256_cvtepi32_epi64(k32);
  const __m256i expo = _mm256_slli_epi64(
      _mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(expo));

  result = _mm256_blendv_pd(
      result, _mm256_setzero_pd(),
      _mm256_cmp_pd(x0, vd_set1(-708.0), _CMP_LE_OQ));
  result = _mm256_blendv_pd(
      result, vd_set1(__builtin_inf()),
      _mm256_cmp_pd(x0, vd_set1(709.7), _CMP_GE_OQ));
  return result;
}

// expm1(x), accurate near 0 where exp(x) - 1 would cancel.
inline __m256d vexpm1_pd(__m256d x) {
  // |x| < 0.34 guarantees the exp argument reduction picks k = 0, so
  // x itself is the reduced argument and expm1(x) = x * q(x).
  __m256d q = vd_set1(1.6059043836821613e-10);
  q = _mm256_add_pd(_mm256_mul_pd(q, x), vd_set1(2.0876756987868098e-09));
  q = _mm256_add_pd(_mm256_mul_pd(q, x), vd_set1(2.5052108385441720e-08));
  q = _mm256_add_pd(_mm256_mul_pd(q, x), vd_set1(2.7557319223985888e-07));
  q = _mm256_add_pd(_mm256_mul_pd(q, x), vd_set1(2.7557319223985893e-06));
  q = _mm256_add_pd(_mm256_mul_pd(q, x), vd_set1(2.4801587301587302e-05));
  q = _mm256_add_pd(_mm256_mul_pd(q, x), vd_set1(1.9841269841269841e-04));
  q = _mm256_add_pd(_mm256_mul_pd(q, x), vd_set1(1.3888888888888889e-03));
  q = _mm256_add_pd(_mm256_mul_pd(q, x), vd_set1(8.3333333333333332e-03));
  q = _mm256_add_pd(_mm256_mul_pd(q, x), vd_set1(4.1666666666666664e-02));
  q = _mm256_add_pd(_mm256_mul_pd(q, x), vd_set1(1.6666666666666666e-01));
  q = _mm256_add_pd(_mm256_mul_pd(q, x), vd_set1(0.5));
  q = _mm256_add_pd(_mm256_mul_pd(q, x), vd_set1(1.0));
  const __m256d small = _mm256_mul_pd(x, q);

  const __m256d big = _mm256_sub_pd(vexp_pd(x), vd_set1(1.0));

  const __m256d absx = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
  const __m256d use_small =
      _mm256_cmp_pd(absx, vd_set1(0.34), _CMP_LT_OQ);
  return _mm256_blendv_pd(big, small, use_small);
}

// ln(x) for positive normal x; other inputs give unspecified values (the
// callers mask those lanes out).
inline __m256d vlog_pd(__m256d x) {
  const __m256i xi = _mm256_castpd_si256(x);

  // Biased exponent as a double via the 2^52 magic-number trick.
  const __m256i ebits = _mm256_srli_epi64(xi, 52);
  const __m256d magic = vd_set1(4503599627370496.0);  // 2^52
  const __m256d ebiased = _mm256_sub_pd(
      _mm256_castsi256_pd(
          _mm256_or_si256(ebits, _mm256_castpd_si256(magic))),
      magic);
  __m256d e = _mm256_sub_pd(ebiased, vd_set1(1023.0));

  // Mantissa in [1, 2).
  const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3ff0000000000000LL);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(xi, mant_mask), one_bits));

  // Halve mantissas above sqrt(2) so |ln m| stays small.
  const __m256d gt = _mm256_cmp_pd(m, vd_set1(1.41421356237309504880),
                                   _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, vd_set1(0.5)), gt);
  e = _mm256_add_pd(e, _mm256_and_pd(gt, vd_set1(1.0)));

  // ln m = 2 atanh(s), s = (m-1)/(m+1), via the odd series in s.
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, vd_set1(1.0)),
                                  _mm256_add_pd(m, vd_set1(1.0)));
  const __m256d z = _mm256_mul_pd(s, s);
  __m256d w = vd_set1(4.7619047619047616e-02);
  w = _mm256_add_pd(_mm256_mul_pd(w, z), vd_set1(5.2631578947368418e-02));
  w = _mm256_add_pd(_mm256_mul_pd(w, z), vd_set1(5.8823529411764705e-02));
  w = _mm256_add_pd(_mm256_mul_pd(w, z), vd_set1(6.6666666666666666e-02));
  w = _mm256_add_pd(_mm256_mul_pd(w, z), vd_set1(7.6923076923076927e-02));
  w = _mm256_add_pd(_mm256_mul_pd(w, z), vd_set1(9.0909090909090912e-02));
  w = _mm256_add_pd(_mm256_mul_pd(w, z), vd_set1(1.1111111111111110e-01));
  w = _mm256_add_pd(_mm256_mul_pd(w, z), vd_set1(1.4285714285714285e-01));
  w = _mm256_add_pd(_mm256_mul_pd(w, z), vd_set1(2.0000000000000001e-01));
  w = _mm256_add_pd(_mm256_mul_pd(w, z), vd_set1(3.3333333333333331e-01));
  w = _mm256_mul_pd(w, z);

  const __m256d ln2_hi = vd_set1(6.93147180369123816490e-01);
  const __m256d ln2_lo = vd_set1(1.90821492927058770002e-10);
  const __m256d two_s = _mm256_add_pd(s, s);
  __m256d result = _mm256_add_pd(_mm256_mul_pd(two_s, w),
                                 _mm256_mul_pd(e, ln2_lo));
  result = _mm256_add_pd(result, two_s);
  result = _mm256_add_pd(result, _mm256_mul_pd(e, ln2_hi));
  return result;
}

// x^g for positive normal x.
inline __m256d vpow_pd(__m256d x, __m256d g) {
  return vexp_pd(_mm256_mul_pd(g, vlog_pd(x)));
}

}  // namespace seg2f::kernels::detail

#endif  // SEG2F_SRC_KERNELS_VEC_MATH_AVX2_HPP_
