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

#ifndef SEG2F_KERNELS_HPP_
#define SEG2F_KERNELS_HPP_

#include <cstddef>
#include <cstdint>

namespace seg2f::kernels {

// Numerically hot inner loops, implemented once as portable scalar code and
// once with AVX2 intrinsics. The active backend is chosen at startup from
// CPU capabilities (override with SEG2F_KERNELS=scalar|avx2 or
// set_backend()).
//
// Contract between backends:
//  * threshold_ge, blend, affine, clamp, axpy_u8 produce bit-identical
//    results (multiply and add only, no fused multiply-add, fixed order).
//  * weighted_ce, tversky_sums, focal_kl, exp_neg_scaled involve exp/log
//    or wide reductions; backends agree to tight relative tolerance but
//    not bitwise. Within one process one backend is active, so pipeline
//    outputs stay deterministic either way.
enum class Backend { kScalar, kAvx2 };

const char* backend_name(Backend backend);
bool backend_supported(Backend backend);
Backend active_backend();
// Throws ValidationError if the backend is not supported on this CPU.
void set_backend(Backend backend);

struct Ops {
  // out[i] = x[i] >= threshold ? 1.0 : 0.0
  void (*threshold_ge)(const double* x, std::size_t n, double threshold,
                       double* out);
  // out[i] = wa * a[i] + wb * b[i]
  void (*blend)(const double* a, const double* b, std::size_t n, double wa,
                double wb, double* out);
  // out[i] = mul * x[i] + add
  void (*affine)(const double* x, std::size_t n, double mul, double add,
                 double* out);
  // out[i] = min(max(x[i], lo), hi)
  void (*clamp)(const double* x, std::size_t n, double lo, double hi,
                double* out);
  // acc[i] += w * counts[i]
  void (*axpy_u8)(const std::uint8_t* counts, std::size_t n, double w,
                  double* acc);
  // Binary cross-entropy with per-pixel weights; y[i] in {0, 1}.
  // Per-pixel loss:
  //   y = 1:  -w * ln(max(yhat, eps))
  //   y = 0:  -w * ln(max(1 - yhat, eps))
  // grad[i] = w * (yhat - y) / (yhat * (1 - yhat)) when eps <= yhat <=
  // 1 - eps, else 0 (the gradient is defined as 0 inside the clamp).
  // Returns the sum of per-pixel losses; grad may be null.
  double (*weighted_ce)(const double* y, const double* yhat, const double* w,
                        std::size_t n, double eps, double* grad);
  // sum_yy = sum(y * yhat), sum_y = sum(y), sum_yh = sum(yhat)
  void (*tversky_sums)(const double* y, const double* yhat, std::size_t n,
                       double* sum_yy, double* sum_y, double* sum_yh);
  // Focal soft distillation on clamped probabilities pt, ps (teacher,
  // student), both already in [eps, 1 - eps]:
  //   kl   = pt*ln(pt/ps) + (1-pt)*ln((1-pt)/(1-ps))
  //   loss = w * (1 - exp(-kl))^gamma * kl        (0 when kl < 1e-12)
  // grad is d loss / d ps; returns the summed loss. grad may be null.
  double (*focal_kl)(const double* pt, const double* ps, const double* w,
                     std::size_t n, double gamma, double* grad);
  // out[i] = exp(-scale * x[i])
  void (*exp_neg_scaled)(const double* x, std::size_t n, double scale,
                         double* out);
};

// Table for the active backend.
const Ops& ops();
// Table for a specific backend (throws if unsupported). Used by the
// equivalence tests.
const Ops& ops_for(Backend backend);

}  // namespace seg2f::kernels

#endif  // SEG2F_KERNELS_HPP_
