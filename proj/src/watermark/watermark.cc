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

#include "cleanmark/watermark.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "cleanmark/errors.h"
#include "cleanmark/rng.h"

namespace cleanmark {

size_t WatermarkCount(size_t class_count, double rate) {
  const double raw = rate * static_cast<double>(class_count);
  return std::min(class_count, static_cast<size_t>(std::ceil(raw - 1e-9)));
}

std::vector<size_t> SelectionOrder(const Dataset& dataset, uint32_t target,
                                   uint64_t seed) {
  std::vector<size_t> members = dataset.IndicesOfClass(target);
  Rng rng(DeriveSeed(seed, "select"));
  rng.Shuffle(members);
  return members;
}

std::vector<size_t> SelectWatermarkSet(const Dataset& dataset, uint32_t target,
                                       double rate, uint64_t seed) {
  if (target >= dataset.num_classes()) {
    throw InvalidArgumentError("target class " + std::to_string(target) +
                               " out of range for " +
                               std::to_string(dataset.num_classes()) + " classes");
  }
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw InvalidArgumentError("injection rate must lie in (0, 1]");
  }
  std::vector<size_t> order = SelectionOrder(dataset, target, seed);
  if (order.empty()) {
    throw InvalidArgumentError("target class " + std::to_string(target) + " has no samples");
  }
  order.resize(WatermarkCount(order.size(), rate));
  std::sort(order.begin(), order.end());
  return order;
}

WatermarkKey MakeWatermarkKey(const Dataset& dataset, uint32_t target, double rate,
                              TriggerSpec trigger, PerturbationBudget budget,
                              uint64_t seed) {
  ValidateTrigger(trigger, dataset);
  WatermarkKey key;
  key.target_class = target;
  key.injection_rate = rate;
  key.trigger = std::move(trigger);
  key.budget = std::move(budget);
  key.seed = seed;
  key.indices = SelectWatermarkSet(dataset, target, rate, seed);
  return key;
}

Sample WatermarkSample(const Model& base_model, const SampleView& x, uint32_t label,
                       const WatermarkKey& key, const Dataset& context, bool* flipped) {
  Sample perturbed;
  bool flip = false;
  if (const auto* pgd = std::get_if<PgdBudget>(&key.budget)) {
    perturbed.values = PgdPerturb(base_model, x.values, label, *pgd, context.modality());
    flip = PredictClass(base_model, perturbed.view()) != label;
  } else {
    const auto& text = std::get<TextBudget>(key.budget);
    TextPerturbResult r = TextPerturb(base_model, x.tokens, label, text);
    perturbed.tokens = std::move(r.tokens);
    flip = r.flipped;
  }
  if (flipped != nullptr) *flipped = flip;
  return Stamp(key.trigger, perturbed.view(), context);
}

WatermarkResult BuildWatermarkedDataset(const Dataset& dataset, const WatermarkKey& key,
                                        const Model& base_model, Execution exec) {
  if (std::holds_alternative<PgdBudget>(key.budget) != IsContinuous(dataset.modality())) {
    throw InvalidArgumentError("perturbation budget does not match the dataset modality");
  }
  ValidateTrigger(key.trigger, dataset);
  CheckCompatible(base_model.arch(), dataset);
  for (size_t i : key.indices) {
    if (i >= dataset.size() || dataset.label(i) != key.target_class) {
      throw InvalidArgumentError("key index " + std::to_string(i) +
                                 " is not a target-class sample of this dataset");
    }
  }

  struct Outcome {
    Sample sample;
    bool ok = false;
    bool flipped = false;
  };
  auto process = [&](size_t i) {
    Outcome out;
    try {
      out.sample = WatermarkSample(base_model, dataset.sample(i), dataset.label(i), key,
                                   dataset, &out.flipped);
      out.ok = true;
    } catch (const NoVerbError&) {
      out.ok = false;
    }
    return out;
  };

  std::vector<Outcome> outcomes(key.indices.size());
  ForEachIndex(key.indices.size(), exec,
               [&](size_t k) { outcomes[k] = process(key.indices[k]); });

  WatermarkResult result{Dataset(), key};
  WatermarkKey& out_key = result.key;
  out_key.base_model_fingerprint = Fingerprint(base_model);
  out_key.indices.clear();
  out_key.skipped.clear();
  out_key.perturbation_flips = 0;

  std::vector<std::pair<size_t, Sample>> accepted;
  std::set<size_t> tried(key.indices.begin(), key.indices.end());
  for (size_t k = 0; k < key.indices.size(); ++k) {
    if (outcomes[k].ok) {
      out_key.perturbation_flips += outcomes[k].flipped;
      accepted.emplace_back(key.indices[k], std::move(outcomes[k].sample));
    } else {
      out_key.skipped.push_back(key.indices[k]);
    }
  }
  // Replacement draws keep |D_wm| when the trigger skipped samples.
  if (!out_key.skipped.empty()) {
    for (size_t i : SelectionOrder(dataset, key.target_class, key.seed)) {
      if (accepted.size() >= key.indices.size()) break;
      if (!tried.insert(i).second) continue;
      Outcome o = process(i);
      if (o.ok) {
        out_key.perturbation_flips += o.flipped;
        accepted.emplace_back(i, std::move(o.sample));
      } else {
        out_key.skipped.push_back(i);
      }
    }
  }
  std::sort(accepted.begin(), accepted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::sort(out_key.skipped.begin(), out_key.skipped.end());
  std::vector<Sample> samples;
  for (auto& [i, s] : accepted) {
    out_key.indices.push_back(i);
    samples.push_back(std::move(s));
  }
  result.dataset = dataset.WithReplacedSamples(out_key.indices, samples);
  return result;
}

}  // namespace cleanmark
