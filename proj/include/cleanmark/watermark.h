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

#ifndef CLEANMARK_WATERMARK_H_
#define CLEANMARK_WATERMARK_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cleanmark/dataset.h"
#include "cleanmark/model.h"
#include "cleanmark/parallel.h"
#include "cleanmark/perturb.h"
#include "cleanmark/trigger.h"

namespace cleanmark {

using PerturbationBudget = std::variant<PgdBudget, TextBudget>;

// The defender's secret. Whoever holds it can run verification, so the key
// file should be readable by its owner only.
struct WatermarkKey {
  uint32_t target_class = 0;
  double injection_rate = 0.1;
  TriggerSpec trigger;
  PerturbationBudget budget;
  std::string base_model_fingerprint;
  // Watermarked sample indices, ascending; all labeled target_class.
  std::vector<size_t> indices;
  // Drawn samples the trigger could not apply to (style, no verb).
  std::vector<size_t> skipped;
  uint64_t seed = 0;
  // Watermark samples whose base-model prediction left the true class after
  // perturbation.
  size_t perturbation_flips = 0;
};

// ceil(rate * class_count), absorbing representation error in the product.
size_t WatermarkCount(size_t class_count, double rate);

// Class-`target` indices in a seeded uniform random order.
std::vector<size_t> SelectionOrder(const Dataset& dataset, uint32_t target, uint64_t seed);

// Uniform without-replacement sample of ceil(rate * n_target) indices of class
// `target`, ascending. Throws InvalidArgumentError if target >= K, the class
// is empty, or rate is outside (0, 1].
std::vector<size_t> SelectWatermarkSet(const Dataset& dataset, uint32_t target,
                                       double rate, uint64_t seed);

// Key with the selection filled in; fingerprint and flips are set by
// BuildWatermarkedDataset.
WatermarkKey MakeWatermarkKey(const Dataset& dataset, uint32_t target, double rate,
                              TriggerSpec trigger, PerturbationBudget budget,
                              uint64_t seed);

// perturb-then-stamp for one sample against the base model.
Sample WatermarkSample(const Model& base_model, const SampleView& x, uint32_t label,
                       const WatermarkKey& key, const Dataset& context,
                       bool* flipped = nullptr);

struct WatermarkResult {
  Dataset dataset;
  WatermarkKey key;
};

// Replaces every selected sample by stamp(perturb(sample)). Labels and all
// other samples are untouched. Samples the trigger cannot apply to are logged
// in key.skipped and replaced by further draws from SelectionOrder while any
// remain. Per-sample work may run concurrently; assembly keeps input order.
WatermarkResult BuildWatermarkedDataset(const Dataset& dataset, const WatermarkKey& key,
                                        const Model& base_model,
                                        Execution exec = Execution::kParallel);

nlohmann::json KeyToJson(const WatermarkKey& key);
WatermarkKey KeyFromJson(const nlohmann::json& doc, const std::string& path);
// Written with owner-only permissions.
void SaveKey(const WatermarkKey& key, const std::filesystem::path& path);
WatermarkKey LoadKey(const std::filesystem::path& path);

}  // namespace cleanmark

#endif  // CLEANMARK_WATERMARK_H_
