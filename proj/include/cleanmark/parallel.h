//
// Copyright 2026 The Cleanmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef CLEANMARK_PARALLEL_H_
#define CLEANMARK_PARALLEL_H_

#include <cstddef>
#include <cstdint>

#if defined(CLEANMARK_HAVE_OPENMP)
#include <omp.h>
#endif

namespace cleanmark {

// How batch kernels run. kSerial is the reference path used by the tests;
// kParallel fans out over samples with OpenMP when it is compiled in.
enum class Execution { kSerial, kParallel };

int MaxThreads();

// Restores the previous OpenMP thread count on scope exit.
class ThreadCountScope {
 public:
  explicit ThreadCountScope(int threads);
  ~ThreadCountScope();
  ThreadCountScope(const ThreadCountScope&) = delete;
  ThreadCountScope& operator=(const ThreadCountScope&) = delete;

 private:
  int previous_;
};

// Calls fn(i) for i in [0, n). Iterations must be independent; each one
// writes only its own output slot, so results do not depend on scheduling.
template <typename Fn>
void ForEachIndex(size_t n, Execution exec, Fn&& fn) {
#if defined(CLEANMARK_HAVE_OPENMP)
  if (exec == Execution::kParallel && n > 1) {
    const int64_t count = static_cast<int64_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
    for (int64_t i = 0; i < count; ++i) fn(static_cast<size_t>(i));
    return;
  }
#endif
  (void)exec;
  for (size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace cleanmark

#endif  // CLEANMARK_PARALLEL_H_
