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

#include <filesystem>

#include "cleanmark/blob_io.h"
#include "cleanmark/json_util.h"
#include "cleanmark/watermark.h"

namespace cleanmark {
namespace {

using nlohmann::json;

constexpr int kKeyFormatVersion = 1;

json BudgetToJson(const PerturbationBudget& budget) {
  json doc;
  if (const auto* pgd = std::get_if<PgdBudget>(&budget)) {
    doc["kind"] = "pgd";
    doc["epsilon"] = pgd->epsilon;
    doc["step_length"] = pgd->step_length;
    doc["iterations"] = pgd->iterations;
  } else {
    const auto& text = std::get<TextBudget>(budget);
    doc["kind"] = "text";
    doc["max_actions"] = text.max_actions;
    doc["similarity_threshold"] = text.similarity_threshold;
    json synonyms = json::array();
    for (const auto& [word, candidates] : text.synonyms) {
      synonyms.push_back({word, candidates});
    }
    doc["synonyms"] = synonyms;
    doc["insertable"] = text.insertable;
  }
  return doc;
}

PerturbationBudget BudgetFromJson(const json& doc, const std::string& path) {
  JsonReader r(doc, path);
  const auto kind = r.Required<std::string>("kind");
  PerturbationBudget out;
  if (kind == "pgd") {
    PgdBudget b;
    b.epsilon = r.Required<double>("epsilon");
    b.step_length = r.Required<double>("step_length");
    b.iterations = r.Required<size_t>("iterations");
    out = b;
  } else if (kind == "text") {
    TextBudget b;
    b.max_actions = r.Required<size_t>("max_actions");
    b.similarity_threshold = r.Required<double>("similarity_threshold");
    for (const auto& entry :
         r.Required<std::vector<std::pair<uint32_t, std::vector<uint32_t>>>>("synonyms")) {
      b.synonyms[entry.first] = entry.second;
    }
    b.insertable = r.Required<std::vector<uint32_t>>("insertable");
    out = std::move(b);
  } else {
    throw ConfigError(r.Child("kind"), "unknown budget kind '" + kind + "'");
  }
  r.RejectUnknown();
  return out;
}

}  // namespace

json KeyToJson(const WatermarkKey& key) {
  json doc;
  doc["format"] = "cleanmark-key";
  doc["version"] = kKeyFormatVersion;
  doc["target_class"] = key.target_class;
  doc["injection_rate"] = key.injection_rate;
  doc["trigger"] = TriggerToJson(key.trigger);
  doc["budget"] = BudgetToJson(key.budget);
  doc["base_model_fingerprint"] = key.base_model_fingerprint;
  doc["indices"] = key.indices;
  doc["skipped"] = key.skipped;
  doc["seed"] = key.seed;
  doc["perturbation_flips"] = key.perturbation_flips;
  return doc;
}

WatermarkKey KeyFromJson(const json& doc, const std::string& path) {
  JsonReader r(doc, path);
  if (r.Required<std::string>("format") != "cleanmark-key") {
    throw ConfigError(r.Child("format"), "not a cleanmark key");
  }
  if (r.Required<int>("version") != kKeyFormatVersion) {
    throw ConfigError(r.Child("version"), "unsupported key version");
  }
  WatermarkKey key;
  key.target_class = r.Required<uint32_t>("target_class");
  key.injection_rate = r.Required<double>("injection_rate");
  key.trigger = TriggerFromJson(r.Raw("trigger"), r.Child("trigger"));
  key.budget = BudgetFromJson(r.Raw("budget"), r.Child("budget"));
  key.base_model_fingerprint = r.Required<std::string>("base_model_fingerprint");
  key.indices = r.Required<std::vector<size_t>>("indices");
  key.skipped = r.Optional<std::vector<size_t>>("skipped", {});
  key.seed = r.Required<uint64_t>("seed");
  key.perturbation_flips = r.Optional<size_t>("perturbation_flips", 0);
  r.RejectUnknown();
  return key;
}

void SaveKey(const WatermarkKey& key, const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  WriteFileText(path, KeyToJson(key).dump(2) + "\n");
  std::filesystem::permissions(
      path, std::filesystem::perms::owner_read | std::filesystem::perms::owner_write,
      std::filesystem::perm_options::replace, ec);
}

WatermarkKey LoadKey(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(ReadFileText(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return KeyFromJson(doc, "");
}

}  // namespace cleanmark
