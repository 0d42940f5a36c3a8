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

#ifndef SEG2F_GRADCHECK_HPP_
#define SEG2F_GRADCHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace seg2f {

struct GradCheckReport {
  std::string loss_name;
  double max_rel_err = 0.0;
  int trials = 0;
};

// Checks every analytical gradient against central finite differences of
// the loss value on random rasters. The finite-difference side uses only
// loss evaluations, never the gradient code. Inputs are drawn away from
// the clamp bands (predictions in [0.05, 0.95]) where the losses are
// smooth. Per raster the error is
//   max_i |g_i - fd_i| / max(max_i |g_i|, max_i |fd_i|, 1e-6),
// the infinity-norm deviation relative to the gradient's scale.
std::vector<GradCheckReport> run_gradient_suite(std::uint64_t seed, int trials,
                                                int size);

}  // namespace seg2f

#endif  // SEG2F_GRADCHECK_HPP_
