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

#ifndef CLEANMARK_CONFIG_H_
#define CLEANMARK_CONFIG_H_

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cleanmark/arch.h"
#include "cleanmark/audit.h"
#include "cleanmark/dataset.h"
#include "cleanmark/synthetic.h"
#include "cleanmark/train.h"
#include "cleanmark/trigger.h"
#include "cleanmark/verify.h"
#include "cleanmark/watermark.h"

namespace cleanmark {

// Environment variable naming the default root for output directories.
inline constexpr char kOutputRootEnv[] = "CLEANMARK_OUT";

struct DatasetSource {
  // Exactly one of generator / manifest is set.
  std::optional<GeneratorSpec> generator;
  std::optional<std::filesystem::path> manifest;
  double train_fraction = 5.0 / 6.0;
};

// Model family and size knobs. Input shape and class count come from the
// dataset.
struct ModelChoice {
  std::optional<Family> family;
  size_t hidden = 32;
  size_t channels1 = 8;
  size_t channels2 = 16;
  size_t kernel = 9;
  size_t stride = 4;
  size_t embed_dim = 16;
};

// A vocabulary word given by name or by id.
struct WordRef {
  std::optional<std::string> name;
  uint32_t id = 0;
};

// Config-form trigger. Unset fields take the per-kind defaults; the full
// TriggerSpec is built once the dataset is known.
struct TriggerChoice {
  std::string kind = "patch";
  // patch
  size_t patch_size = 3;
  std::optional<size_t> row;
  std::optional<size_t> col;
  double transparency = 0.0;
  // blend
  size_t tile = 4;
  double blend_ratio = 0.1;
  // impulse
  ImpulseTrigger impulse;
  // word
  WordRef word;
  WordPosition position = WordPosition::kEnd;
  // style
  WordRef will, have, been;
  std::vector<std::pair<WordRef, WordRef>> participles;
};

struct BudgetChoice {
  std::optional<double> epsilon;
  std::optional<double> step_length;
  std::optional<size_t> iterations;
  size_t max_actions = 5;
  double similarity_threshold = 0.85;
  // Text only. Without a table, synthetic corpora use their own lexicon.
  std::optional<std::filesystem::path> synonyms_path;
  std::vector<WordRef> insertable;
};

struct WatermarkSettings {
  uint32_t target_class = 0;
  std::vector<double> rates = {0.1};
  TriggerChoice trigger;
  BudgetChoice budget;
};

struct AuditSettings {
  double flag_fraction = kDefaultFlagFraction;
  bool confidence = true;
  // Only image and audio data; ignored for text.
  bool reconstruction = true;
  AutoencoderConfig autoencoder;
};

struct RunConfig {
  std::string name;
  std::optional<std::filesystem::path> output_dir;
  uint64_t seed = 0;
  size_t repetitions = 1;
  DatasetSource dataset;
  ModelChoice base_model;
  // Defaults to the base model; a different family gives a transfer run.
  ModelChoice target_model;
  TrainConfig train;
  WatermarkSettings watermark;
  VerifyParams verify;
  size_t trials = 100;
  AuditSettings audit;
  // Directory the config was read from; relative paths resolve against it.
  std::filesystem::path base_dir;
  nlohmann::json source;
};

// Full validation, unknown keys rejected. Errors are ConfigError with the
// dotted path of the offending field.
RunConfig ConfigFromJson(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig ParseConfig(const std::filesystem::path& path);

// Output root: the config value, else $CLEANMARK_OUT/<name>, else
// ./cleanmark-out/<name>.
std::filesystem::path OutputDirectory(const RunConfig& cfg);

ArchSpec ResolveArch(const ModelChoice& choice, const Dataset& dataset);
TriggerSpec ResolveTrigger(const TriggerChoice& choice, const Dataset& dataset, uint64_t seed);
PerturbationBudget ResolveBudget(const BudgetChoice& choice, const RunConfig& cfg,
                                 const Dataset& dataset);
GeneratorSpec GeneratorFromJson(const nlohmann::json& doc, const std::string& path);

}  // namespace cleanmark

#endif  // CLEANMARK_CONFIG_H_
