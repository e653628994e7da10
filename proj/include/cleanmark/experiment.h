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

#ifndef CLEANMARK_EXPERIMENT_H_
#define CLEANMARK_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include "cleanmark/audit.h"
#include "cleanmark/config.h"
#include "cleanmark/dataset.h"
#include "cleanmark/model.h"
#include "cleanmark/parallel.h"
#include "cleanmark/verify.h"
#include "cleanmark/watermark.h"

namespace cleanmark {

inline constexpr char kToolVersion[] = "1.0.0";

// Everything one (repetition, rate) sub-run produced. References are valid
// only during the observer call.
struct RepetitionContext {
  size_t repetition = 0;
  uint64_t seed = 0;
  double rate = 0.0;
  const Dataset& train;
  const Dataset& test;
  const Dataset& watermarked;
  const WatermarkKey& key;
  const Model& base_model;
  const Model& benign_model;
  const Model& watermarked_model;
  const ProbeTable& probes;
  const ProbeTable& benign_probes;
  const RepetitionResult& result;
};

struct ExperimentOptions {
  // Artifacts are written only when set.
  std::optional<std::filesystem::path> output_dir;
  Execution exec = Execution::kParallel;
  std::ostream* log = nullptr;
  std::function<void(const RepetitionContext&)> observer;
};

uint64_t RepetitionSeed(const RunConfig& cfg, size_t repetition);

struct PreparedData {
  Dataset train;
  Dataset test;
};
// Generates (or loads) the corpus and splits it for one repetition.
PreparedData PrepareData(const RunConfig& cfg, uint64_t repetition_seed);

// The benign training configuration for a repetition; watermarked models
// reuse it so that only the data differs.
TrainConfig RepetitionTraining(const RunConfig& cfg, uint64_t repetition_seed);
uint64_t InitSeed(uint64_t repetition_seed, std::string_view role);

// Runs generate -> train benign -> watermark -> train suspect -> verify ->
// audit for every repetition and rate. Identical config and seed give
// identical metrics.
ExperimentSummary RunExperiment(const RunConfig& cfg, const ExperimentOptions& options = {});

// SHA-256 of the canonical (sorted-key) config JSON.
std::string ConfigHash(const RunConfig& cfg);

// Writes <artifact>.prov.json next to the artifact.
void WriteProvenance(const std::filesystem::path& artifact, const std::string& config_hash,
                     uint64_t seed);

}  // namespace cleanmark

#endif  // CLEANMARK_EXPERIMENT_H_
