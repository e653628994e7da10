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

#include "cleanmark/verify.h"

#include <algorithm>

#include "cleanmark/errors.h"
#include "cleanmark/rng.h"

namespace cleanmark {

ProbeTable BuildProbeTable(const Model& model, const Dataset& test_set,
                           const TriggerSpec& trigger, uint32_t target_class,
                           Execution exec) {
  if (target_class >= test_set.num_classes()) {
    throw InvalidArgumentError("target class out of range");
  }
  CheckCompatible(model.arch(), test_set);
  ValidateTrigger(trigger, test_set);
  std::vector<size_t> members;
  for (size_t i = 0; i < test_set.size(); ++i) {
    if (test_set.label(i) != target_class) members.push_back(i);
  }
  if (members.empty()) throw InvalidArgumentError("test set has no non-target samples");

  struct Scored {
    ProbePair pair;
    uint32_t stamped = 0;
    bool ok = true;
  };
  std::vector<Scored> scored(members.size());
  ForEachIndex(members.size(), exec, [&](size_t k) {
    const size_t i = members[k];
    Scored& s = scored[k];
    s.pair.index = i;
    s.pair.q = PredictProba(model, test_set.sample(i))[target_class];
    try {
      const Sample stamped = Stamp(trigger, test_set.sample(i), test_set);
      const std::vector<double> proba = PredictProba(model, stamped.view());
      s.pair.p = proba[target_class];
      s.stamped = ArgMax(proba);
    } catch (const NoVerbError&) {
      s.ok = false;
    }
  });

  ProbeTable table;
  table.target_class = target_class;
  for (const Scored& s : scored) {
    if (s.ok) {
      table.entries.push_back(s.pair);
      table.stamped_class.push_back(s.stamped);
    } else {
      table.unstampable.push_back(s.pair.index);
    }
  }
  return table;
}

ProbePairs PairedProbe(const ProbeTable& table, size_t n, uint64_t seed) {
  if (n == 0) throw InvalidArgumentError("probe count must be positive");
  const size_t available = table.entries.size() + table.unstampable.size();
  if (table.entries.size() < n) {
    throw InvalidArgumentError("need " + std::to_string(n) + " probes but the test set has " +
                               std::to_string(table.entries.size()) +
                               " usable non-target samples");
  }
  // Draw over all non-C samples so the draw does not depend on which ones the
  // trigger can stamp; unstampable draws are skipped.
  std::vector<size_t> slots(available);
  for (size_t k = 0; k < available; ++k) slots[k] = k;
  Rng rng(DeriveSeed(seed, "probe"));
  rng.Shuffle(slots);
  ProbePairs pairs;
  pairs.reserve(n);
  for (size_t slot : slots) {
    if (slot >= table.entries.size()) continue;
    pairs.push_back(table.entries[slot]);
    if (pairs.size() == n) break;
  }
  return pairs;
}

ProbePairs PairedProbe(const Model& model, const Dataset& test_set,
                       const TriggerSpec& trigger, uint32_t target_class, size_t n,
                       uint64_t seed) {
  return PairedProbe(BuildProbeTable(model, test_set, trigger, target_class), n, seed);
}

void ValidateVerifyParams(const VerifyParams& params) {
  if (!(params.certainty >= 0.0 && params.certainty <= 1.0)) {
    throw InvalidArgumentError("certainty must lie in [0, 1]");
  }
  if (!(params.significance > 0.0 && params.significance < 1.0)) {
    throw InvalidArgumentError("significance must lie in (0, 1)");
  }
  if (params.num_probes == 0) throw InvalidArgumentError("probe count must be positive");
}

VerificationReport DecideFromProbes(const ProbePairs& pairs, const VerifyParams& params,
                                    uint64_t seed) {
  ValidateVerifyParams(params);
  if (pairs.empty()) throw InvalidArgumentError("no probe pairs");
  std::vector<double> d;
  d.reserve(pairs.size());
  VerificationReport report;
  for (const ProbePair& pr : pairs) {
    d.push_back(pr.p - pr.q - params.certainty);
    report.mean_p += pr.p;
    report.mean_q += pr.q;
  }
  report.mean_p /= static_cast<double>(pairs.size());
  report.mean_q /= static_cast<double>(pairs.size());
  report.num_probes = pairs.size();
  report.certainty = params.certainty;
  report.significance = params.significance;
  report.seed = seed;
  report.test = WilcoxonOneSided(d);
  report.detected = report.test.p_value < params.significance;
  return report;
}

VerificationReport DetectWatermark(const Model& model, const WatermarkKey& key,
                                   const Dataset& test_set, const VerifyParams& params,
                                   uint64_t seed) {
  ValidateVerifyParams(params);
  const ProbeTable table = BuildProbeTable(model, test_set, key.trigger, key.target_class);
  return DecideFromProbes(PairedProbe(table, params.num_probes, seed), params, seed);
}

std::vector<VerificationReport> RunVerificationTrials(const ProbeTable& table,
                                                      const VerifyParams& params,
                                                      size_t trials, uint64_t seed) {
  ValidateVerifyParams(params);
  std::vector<VerificationReport> reports;
  reports.reserve(trials);
  for (size_t t = 0; t < trials; ++t) {
    const uint64_t trial_seed = DeriveSeed(seed, t);
    reports.push_back(
        DecideFromProbes(PairedProbe(table, params.num_probes, trial_seed), params, trial_seed));
  }
  return reports;
}

double TriggerSuccessRate(const ProbeTable& table) {
  if (table.entries.empty()) throw InvalidArgumentError("no stampable non-target samples");
  const auto hits = std::count(table.stamped_class.begin(), table.stamped_class.end(),
                               table.target_class);
  return static_cast<double>(hits) / static_cast<double>(table.entries.size());
}

double TriggerSuccessRate(const Model& model, const Dataset& test_set,
                          const TriggerSpec& trigger, uint32_t target_class) {
  return TriggerSuccessRate(BuildProbeTable(model, test_set, trigger, target_class));
}

nlohmann::json ReportToJson(const VerificationReport& report) {
  return {
      {"num_probes", report.num_probes},
      {"certainty", report.certainty},
      {"significance", report.significance},
      {"w_plus", report.test.w_plus},
      {"p_value", report.test.p_value},
      {"effective_n", report.test.effective_n},
      {"exact", report.test.exact},
      {"degenerate", report.test.degenerate},
      {"decision", report.detected ? "detected" : "not-detected"},
      {"seed", report.seed},
      {"mean_p", report.mean_p},
      {"mean_q", report.mean_q},
  };
}

}  // namespace cleanmark
