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

#include <algorithm>
#include <cmath>

#include "cleanmark/dataset.h"
#include "cleanmark/errors.h"
#include "cleanmark/rng.h"

namespace cleanmark {

SplitIndices StratifiedSplitIndices(const Dataset& dataset, double train_fraction,
                                    uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgumentError("train_fraction must lie in (0, 1)");
  }
  if (dataset.empty()) throw InvalidArgumentError("cannot split an empty dataset");
  SplitIndices out;
  for (uint32_t c = 0; c < dataset.num_classes(); ++c) {
    std::vector<size_t> members = dataset.IndicesOfClass(c);
    Rng rng(DeriveSeed(seed, c));
    rng.Shuffle(members);
    const auto take = static_cast<size_t>(
        std::llround(train_fraction * static_cast<double>(members.size())));
    out.train.insert(out.train.end(), members.begin(),
                     members.begin() + static_cast<std::ptrdiff_t>(take));
    out.test.insert(out.test.end(),
                    members.begin() + static_cast<std::ptrdiff_t>(take), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<Dataset, Dataset> Split(const Dataset& dataset, double train_fraction,
                                  uint64_t seed) {
  SplitIndices idx = StratifiedSplitIndices(dataset, train_fraction, seed);
  return {dataset.Subset(idx.train), dataset.Subset(idx.test)};
}

}  // namespace cleanmark
