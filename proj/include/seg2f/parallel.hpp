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

#ifndef SEG2F_PARALLEL_HPP_
#define SEG2F_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace seg2f {

// Number of worker threads used by parallel_for. Defaults to 1.
void set_thread_count(int n);
int thread_count();

// Runs fn(begin, end) over disjoint chunks of [0, n). Chunk boundaries
// depend only on n, never on the thread count, and each chunk writes its
// own outputs, so results are byte-identical for any thread count.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace seg2f

#endif  // SEG2F_PARALLEL_HPP_
