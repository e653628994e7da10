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

#ifndef CLEANMARK_VERIFY_H_
#define CLEANMARK_VERIFY_H_

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cleanmark/dataset.h"
#include "cleanmark/model.h"
#include "cleanmark/parallel.h"
#include "cleanmark/trigger.h"
#include "cleanmark/watermark.h"

namespace cleanmark {

inline constexpr double kDefaultCertainty = 0.1;
inline constexpr double kDefaultSignificance = 0.05;
inline constexpr size_t kDefaultProbeCount = 200;
// Above this many nonzero differences the normal approximation is used.
inline constexpr size_t kExactWilcoxonLimit = 25;

struct WilcoxonResult {
  double w_plus = 0.0;
  double p_value = 1.0;
  // Differences left after dropping zeros.
  size_t effective_n = 0;
  bool exact = true;
  // Every difference was zero; p_value is 1 by convention.
  bool degenerate = false;
};

// Average ranks (1-based) of |d| ascending. Exact ties share a rank.
std::vector<double> AverageRanks(std::span<const double> magnitudes);

// One-sided signed-rank test of H1: the differences are shifted above zero.
// p = P(W >= W+) under the null. Throws InvalidArgumentError on empty input
// or non-finite values.
WilcoxonResult WilcoxonOneSided(std::span<const double> differences);

struct ProbePair {
  size_t index = 0;  // position in the test set
  double p = 0.0;    // P(C | stamped x)
  double q = 0.0;    // P(C | x)
};
using ProbePairs = std::vector<ProbePair>;

// Every non-C test sample scored once, clean and stamped. Probing trials draw
// from this table so repeated trials do not repeat forward passes.
struct ProbeTable {
  uint32_t target_class = 0;
  std::vector<ProbePair> entries;         // ascending index
  std::vector<uint32_t> stamped_class;    // argmax on the stamped input
  std::vector<size_t> unstampable;        // style samples without a verb
};

ProbeTable BuildProbeTable(const Model& model, const Dataset& test_set,
                           const TriggerSpec& trigger, uint32_t target_class,
                           Execution exec = Execution::kParallel);

// n probes without replacement from the non-C samples, deterministic in seed.
// Unstampable samples are passed over in favour of the next draw.
ProbePairs PairedProbe(const ProbeTable& table, size_t n, uint64_t seed);
ProbePairs PairedProbe(const Model& model, const Dataset& test_set,
                       const TriggerSpec& trigger, uint32_t target_class, size_t n,
                       uint64_t seed);

struct VerifyParams {
  double certainty = kDefaultCertainty;
  double significance = kDefaultSignificance;
  size_t num_probes = kDefaultProbeCount;
};
void ValidateVerifyParams(const VerifyParams& params);

struct VerificationReport {
  size_t num_probes = 0;
  double certainty = kDefaultCertainty;
  double significance = kDefaultSignificance;
  WilcoxonResult test;
  bool detected = false;
  uint64_t seed = 0;
  double mean_p = 0.0;
  double mean_q = 0.0;
};

// Tests median(p - q) >= certainty on the given pairs.
VerificationReport DecideFromProbes(const ProbePairs& pairs, const VerifyParams& params,
                                    uint64_t seed = 0);

VerificationReport DetectWatermark(const Model& model, const WatermarkKey& key,
                                   const Dataset& test_set, const VerifyParams& params,
                                   uint64_t seed);

// One report per trial; trial t probes with DeriveSeed(seed, t).
std::vector<VerificationReport> RunVerificationTrials(const ProbeTable& table,
                                                      const VerifyParams& params,
                                                      size_t trials, uint64_t seed);

// Fraction of stampable non-C samples classified as C after stamping.
double TriggerSuccessRate(const ProbeTable& table);
double TriggerSuccessRate(const Model& model, const Dataset& test_set,
                          const TriggerSpec& trigger, uint32_t target_class);

nlohmann::json ReportToJson(const VerificationReport& report);

}  // namespace cleanmark

#endif  // CLEANMARK_VERIFY_H_
