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

#include "cleanmark/config.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "cleanmark/errors.h"
#include "cleanmark/json_util.h"
#include "cleanmark/blob_io.h"
#include "test_util.h"

namespace cleanmark {
namespace {

using nlohmann::json;
using testing::TempDir;

json Minimal() {
  return json::parse(R"({
    "name": "mini",
    "dataset": {"generator": {"modality": "image", "num_classes": 3}},
    "watermark": {"rates": [0.1], "trigger": {"kind": "patch"}}
  })");
}

std::string ErrorPath(const json& doc) {
  try {
    ConfigFromJson(doc, ".");
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

TEST(ConfigTest, BundledConfigsParse) {
  const std::filesystem::path dir = std::filesystem::path(CLEANMARK_SOURCE_DIR) / "configs";
  size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    EXPECT_NO_THROW(ParseConfig(entry.path())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 3u);
}

TEST(ConfigTest, DefaultsFromMinimalDocument) {
  const RunConfig cfg = ConfigFromJson(Minimal(), ".");
  EXPECT_EQ(cfg.name, "mini");
  EXPECT_EQ(cfg.repetitions, 1u);
  EXPECT_EQ(cfg.watermark.rates, (std::vector<double>{0.1}));
  EXPECT_EQ(cfg.verify.num_probes, 200u);
  EXPECT_EQ(cfg.verify.certainty, 0.1);
  EXPECT_EQ(cfg.verify.significance, 0.05);
  EXPECT_EQ(cfg.trials, 100u);
  ASSERT_TRUE(cfg.dataset.generator.has_value());
  EXPECT_EQ(cfg.dataset.generator->image.num_classes, 3u);
}

TEST(ConfigTest, SingleRateAlias) {
  json doc = Minimal();
  doc["watermark"].erase("rates");
  doc["watermark"]["rate"] = 0.2;
  EXPECT_EQ(ConfigFromJson(doc, ".").watermark.rates, (std::vector<double>{0.2}));
}

TEST(ConfigTest, ValidationErrorsNameTheField) {
  json doc = Minimal();
  doc["watermark"]["rates"] = {0.0};
  EXPECT_EQ(ErrorPath(doc), "watermark.rates");

  doc = Minimal();
  doc["verify"] = {{"certainty", 1.5}};
  EXPECT_EQ(ErrorPath(doc), "verify.certainty");

  doc = Minimal();
  doc["dataset"]["generator"].erase("num_classes");
  EXPECT_EQ(ErrorPath(doc), "dataset.generator.num_classes");

  doc = Minimal();
  doc["verify"] = {{"num_probs", 10}};
  EXPECT_EQ(ErrorPath(doc), "verify.num_probs");

  doc = Minimal();
  doc["watermark"]["trigger"]["kind"] = "laser";
  EXPECT_EQ(ErrorPath(doc), "watermark.trigger.kind");

  doc = Minimal();
  doc["dataset"]["manifest"] = "data.json";
  EXPECT_EQ(ErrorPath(doc), "dataset");
}

TEST(ConfigTest, UnknownTopLevelKeyRejected) {
  json doc = Minimal();
  doc["repetitons"] = 3;
  EXPECT_EQ(ErrorPath(doc), "repetitons");
}

TEST(ConfigTest, FileErrorsAreConfigErrors) {
  TempDir dir;
  EXPECT_THROW(ParseConfig(dir / "missing.json"), ConfigError);
  WriteFileText(dir / "bad.json", "{ not json");
  EXPECT_THROW(ParseConfig(dir / "bad.json"), ConfigError);
}

TEST(ConfigTest, OutputDirectoryResolution) {
  json doc = Minimal();
  doc["output_dir"] = "runs/here";
  RunConfig cfg = ConfigFromJson(doc, "/base");
  EXPECT_EQ(OutputDirectory(cfg), std::filesystem::path("/base/runs/here"));

  cfg = ConfigFromJson(Minimal(), "/base");
  ::setenv(kOutputRootEnv, "/tmp/cm-root", 1);
  EXPECT_EQ(OutputDirectory(cfg), std::filesystem::path("/tmp/cm-root/mini"));
  ::unsetenv(kOutputRootEnv);
  EXPECT_EQ(OutputDirectory(cfg), std::filesystem::path("cleanmark-out/mini"));
}

TEST(ConfigTest, ModalityMismatchedTriggerRejectedAtResolution) {
  json doc = Minimal();
  doc["watermark"]["trigger"] = {{"kind", "impulse"}};
  const RunConfig cfg = ConfigFromJson(doc, ".");
  EXPECT_EQ(cfg.watermark.trigger.kind, "impulse");
  const Dataset images = testing::RandomImages(6, 3, {8, 8, 1}, 1);
  EXPECT_THROW(ResolveTrigger(cfg.watermark.trigger, images, 1), ConfigError);
}

}  // namespace
}  // namespace cleanmark
