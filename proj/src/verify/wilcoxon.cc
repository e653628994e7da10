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
#include <numeric>
#include <vector>

#include "cleanmark/errors.h"
#include "cleanmark/verify.h"

namespace cleanmark {

std::vector<double> AverageRanks(std::span<const double> magnitudes) {
  const size_t m = magnitudes.size();
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return magnitudes[a] < magnitudes[b]; });
  std::vector<double> ranks(m);
  for (size_t lo = 0; lo < m;) {
    size_t hi = lo;
    while (hi + 1 < m && magnitudes[order[hi + 1]] == magnitudes[order[lo]]) ++hi;
    const double rank = 0.5 * static_cast<double>(lo + 1 + hi + 1);
    for (size_t k = lo; k <= hi; ++k) ranks[order[k]] = rank;
    lo = hi + 1;
  }
  return ranks;
}

namespace {

// P(W >= w_plus) by counting sign patterns over doubled (integer) ranks.
double ExactUpperTail(const std::vector<double>& ranks, double w_plus) {
  std::vector<size_t> doubled(ranks.size());
  size_t total = 0;
  for (size_t i = 0; i < ranks.size(); ++i) {
    doubled[i] = static_cast<size_t>(std::llround(2.0 * ranks[i]));
    total += doubled[i];
  }
  // counts[s] = number of subsets whose doubled rank sum is s; at most 2^25,
  // exact in a double.
  std::vector<double> counts(total + 1, 0.0);
  counts[0] = 1.0;
  size_t reach = 0;
  for (size_t r : doubled) {
    for (size_t s = reach + 1; s-- > 0;) {
      if (counts[s] != 0.0) counts[s + r] += counts[s];
    }
    reach += r;
  }
  const auto threshold = static_cast<size_t>(std::llround(2.0 * w_plus));
  double tail = 0.0;
  for (size_t s = threshold; s <= total; ++s) tail += counts[s];
  return std::ldexp(tail, -static_cast<int>(ranks.size()));
}

double NormalUpperTail(const std::vector<double>& ranks,
                       const std::vector<double>& magnitudes, double w_plus) {
  const auto m = static_cast<double>(ranks.size());
  const double mu = m * (m + 1.0) / 4.0;
  std::vector<double> sorted = magnitudes;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (size_t lo = 0; lo < sorted.size();) {
    size_t hi = lo;
    while (hi + 1 < sorted.size() && sorted[hi + 1] == sorted[lo]) ++hi;
    const auto t = static_cast<double>(hi - lo + 1);
    tie_term += t * t * t - t;
    lo = hi + 1;
  }
  const double variance = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0 - tie_term / 48.0;
  const double z = (w_plus - mu - 0.5) / std::sqrt(variance);
  return std::clamp(0.5 * std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
}

}  // namespace

WilcoxonResult WilcoxonOneSided(std::span<const double> differences) {
  if (differences.empty()) throw InvalidArgumentError("Wilcoxon test needs differences");
  std::vector<double> magnitudes;
  std::vector<bool> positive;
  for (double d : differences) {
    if (!std::isfinite(d)) throw InvalidArgumentError("non-finite difference");
    if (d == 0.0) continue;
    magnitudes.push_back(std::fabs(d));
    positive.push_back(d > 0.0);
  }
  WilcoxonResult result;
  result.effective_n = magnitudes.size();
  if (magnitudes.empty()) {
    result.degenerate = true;
    return result;
  }
  const std::vector<double> ranks = AverageRanks(magnitudes);
  for (size_t i = 0; i < ranks.size(); ++i) {
    if (positive[i]) result.w_plus += ranks[i];
  }
  result.exact = result.effective_n <= kExactWilcoxonLimit;
  result.p_value = result.exact ? ExactUpperTail(ranks, result.w_plus)
                                : NormalUpperTail(ranks, magnitudes, result.w_plus);
  return result;
}

}  // namespace cleanmark
