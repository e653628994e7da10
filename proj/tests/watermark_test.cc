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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "cleanmark/errors.h"
#include "cleanmark/synthetic.h"
#include "cleanmark/train.h"
#include "test_util.h"

namespace cleanmark {
namespace {

using testing::RandomImages;
using testing::RandomText;
using testing::TempDir;

ArchSpec LinearFor(const Dataset& d) {
  ArchSpec a;
  a.family = Family::kLinearSoftmax;
  a.input_shape = d.sample_shape();
  a.num_classes = d.num_classes();
  return a;
}

bool SameSample(const SampleView& a, const SampleView& b) {
  return std::equal(a.values.begin(), a.values.end(), b.values.begin(), b.values.end()) &&
         std::equal(a.tokens.begin(), a.tokens.end(), b.tokens.begin(), b.tokens.end());
}

TEST(SelectTest, CountsAndMembership) {
  // 1500 samples over 3 classes: 500 per class.
  const Dataset d = RandomImages(1500, 3, {2, 2, 1}, 1);
  const auto idx = SelectWatermarkSet(d, 1, 0.1, 7);
  EXPECT_EQ(idx.size(), 50u);
  EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
  EXPECT_EQ(std::set<size_t>(idx.begin(), idx.end()).size(), 50u);
  for (size_t i : idx) EXPECT_EQ(d.label(i), 1u);
  EXPECT_EQ(idx, SelectWatermarkSet(d, 1, 0.1, 7));
  EXPECT_NE(idx, SelectWatermarkSet(d, 1, 0.1, 8));

  const auto all = SelectWatermarkSet(d, 2, 1.0, 7);
  EXPECT_EQ(all.size(), 500u);
}

TEST(SelectTest, CountRoundsUp) {
  EXPECT_EQ(WatermarkCount(500, 0.1), 50u);
  EXPECT_EQ(WatermarkCount(1000, 0.01), 10u);
  EXPECT_EQ(WatermarkCount(99, 0.1), 10u);
  EXPECT_EQ(WatermarkCount(7, 1.0), 7u);
}

TEST(SelectTest, Errors) {
  const Dataset d = RandomImages(30, 3, {2, 2, 1}, 1);
  EXPECT_THROW(SelectWatermarkSet(d, 3, 0.1, 1), InvalidArgumentError);
  EXPECT_THROW(SelectWatermarkSet(d, 0, 0.0, 1), InvalidArgumentError);
  EXPECT_THROW(SelectWatermarkSet(d, 0, 1.5, 1), InvalidArgumentError);
}

Dataset PipelineData() {
  GeneratorSpec spec;
  spec.modality = Modality::kImage;
  spec.image.num_samples = 300;
  return GenerateSynthetic(spec, 11);
}

Model TrainBase(const Dataset& d) {
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 32;
  return Train(InitModel(LinearFor(d), 3), d, cfg);
}

class ImagePipelineTest : public ::testing::Test {
 protected:
  ImagePipelineTest() : data_(PipelineData()), base_(TrainBase(data_)) {}
  Dataset data_;
  Model base_;
};

TEST_F(ImagePipelineTest, CleanLabelAndLocality) {
  const PatchTrigger patch = DefaultPatch(data_.sample_shape());
  const PgdBudget budget = DefaultPgdBudget(Modality::kImage);
  const WatermarkKey key = MakeWatermarkKey(data_, 0, 0.2, patch, budget, 5);
  const WatermarkResult out = BuildWatermarkedDataset(data_, key, base_);
  ASSERT_EQ(out.dataset.size(), data_.size());
  EXPECT_EQ(out.dataset.labels(), data_.labels());
  EXPECT_EQ(out.key.indices, key.indices);
  EXPECT_EQ(out.key.base_model_fingerprint, Fingerprint(base_));

  const std::set<size_t> chosen(key.indices.begin(), key.indices.end());
  const auto& shape = data_.sample_shape();
  const size_t w = shape[1], c = shape[2];
  for (size_t i = 0; i < data_.size(); ++i) {
    const auto x = data_.sample(i).values;
    const auto y = out.dataset.sample(i).values;
    if (!chosen.count(i)) {
      ASSERT_TRUE(SameSample(data_.sample(i), out.dataset.sample(i))) << i;
      continue;
    }
    EXPECT_EQ(data_.label(i), 0u);
    for (size_t j = 0; j < x.size(); ++j) {
      const size_t row = j / (w * c), col = (j / c) % w;
      const bool in_patch = row >= patch.row && row < patch.row + 3 && col >= patch.col &&
                            col < patch.col + 3;
      if (in_patch) {
        const size_t pj = ((row - patch.row) * 3 + (col - patch.col)) * c + j % c;
        EXPECT_EQ(y[j], patch.pattern[pj]);
      } else {
        EXPECT_LE(std::fabs(static_cast<double>(y[j]) - x[j]), budget.epsilon + 1e-7);
      }
    }
  }
}

TEST_F(ImagePipelineTest, SerialMatchesParallel) {
  const WatermarkKey key = MakeWatermarkKey(data_, 1, 0.3, DefaultPatch(data_.sample_shape()),
                                            DefaultPgdBudget(Modality::kImage), 9);
  const auto a = BuildWatermarkedDataset(data_, key, base_, Execution::kParallel);
  const auto b = BuildWatermarkedDataset(data_, key, base_, Execution::kSerial);
  EXPECT_EQ(a.key.perturbation_flips, b.key.perturbation_flips);
  for (size_t i = 0; i < data_.size(); ++i) {
    ASSERT_TRUE(SameSample(a.dataset.sample(i), b.dataset.sample(i))) << i;
  }
}

TEST_F(ImagePipelineTest, EmptySelectionLeavesDatasetIdentical) {
  WatermarkKey key = MakeWatermarkKey(data_, 0, 0.1, DefaultPatch(data_.sample_shape()),
                                      DefaultPgdBudget(Modality::kImage), 1);
  key.indices.clear();
  const auto out = BuildWatermarkedDataset(data_, key, base_);
  for (size_t i = 0; i < data_.size(); ++i) {
    ASSERT_TRUE(SameSample(data_.sample(i), out.dataset.sample(i)));
  }
}

TEST_F(ImagePipelineTest, RejectsForeignIndicesAndBudgets) {
  WatermarkKey key = MakeWatermarkKey(data_, 0, 0.1, DefaultPatch(data_.sample_shape()),
                                      DefaultPgdBudget(Modality::kImage), 1);
  size_t other = 0;
  while (data_.label(other) == 0) ++other;
  key.indices.push_back(other);
  EXPECT_THROW(BuildWatermarkedDataset(data_, key, base_), InvalidArgumentError);
  key = MakeWatermarkKey(data_, 0, 0.1, DefaultPatch(data_.sample_shape()), TextBudget{}, 1);
  EXPECT_THROW(BuildWatermarkedDataset(data_, key, base_), InvalidArgumentError);
}

TEST(TextPipelineTest, StyleSkipsAndRedrawsNoVerbSamples) {
  // Token 0 acts as the only verb; sentences without it are skipped.
  const Dataset d = RandomText(400, 2, 12, 3);
  ArchSpec a;
  a.family = Family::kBowText;
  a.input_shape = {12};
  a.num_classes = 2;
  const Model base = InitModel(a, 1);
  StyleTrigger style;
  style.will_id = 9;
  style.have_id = 10;
  style.been_id = 11;
  style.participles = {{0, 8}};
  const WatermarkKey key = MakeWatermarkKey(d, 0, 0.25, style, TextBudget{}, 4);
  const auto out = BuildWatermarkedDataset(d, key, base);

  size_t with_verb = 0;
  for (size_t i = 0; i < d.size(); ++i) {
    const auto t = d.sample(i).tokens;
    with_verb += d.label(i) == 0 && std::find(t.begin(), t.end(), 0u) != t.end();
  }
  EXPECT_EQ(out.key.indices.size(), std::min(key.indices.size(), with_verb));
  EXPECT_FALSE(out.key.skipped.empty());
  EXPECT_EQ(out.dataset.labels(), d.labels());
  for (size_t i : out.key.indices) {
    const auto t = d.sample(i).tokens;
    EXPECT_NE(std::find(t.begin(), t.end(), 0u), t.end());
    EXPECT_EQ(out.dataset.sample(i).tokens.size(), t.size() + 3);
  }
  for (size_t i : out.key.skipped) {
    const auto t = d.sample(i).tokens;
    EXPECT_EQ(std::find(t.begin(), t.end(), 0u), t.end());
    EXPECT_TRUE(SameSample(d.sample(i), out.dataset.sample(i)));
  }
}

TEST(KeyIoTest, RoundTripAndPermissions) {
  TextBudget tb;
  tb.synonyms = {{3, {4, 5}}, {6, {7}}};
  tb.insertable = {1, 2};
  tb.max_actions = 4;
  WatermarkKey key;
  key.target_class = 1;
  key.injection_rate = 0.05;
  key.trigger = WordTrigger{7, WordPosition::kInitial};
  key.budget = tb;
  key.base_model_fingerprint = "abc";
  key.indices = {1, 5, 9};
  key.skipped = {4};
  key.seed = 18446744073709551615ull;
  key.perturbation_flips = 2;

  TempDir dir;
  SaveKey(key, dir / "key.json");
  const auto perms = std::filesystem::status(dir / "key.json").permissions();
  EXPECT_EQ(perms & (std::filesystem::perms::group_all | std::filesystem::perms::others_all),
            std::filesystem::perms::none);
  const WatermarkKey back = LoadKey(dir / "key.json");
  EXPECT_EQ(back.target_class, 1u);
  EXPECT_EQ(back.injection_rate, 0.05);
  EXPECT_EQ(back.trigger, key.trigger);
  const auto& tb2 = std::get<TextBudget>(back.budget);
  EXPECT_EQ(tb2.synonyms, tb.synonyms);
  EXPECT_EQ(tb2.insertable, tb.insertable);
  EXPECT_EQ(tb2.max_actions, 4u);
  EXPECT_EQ(back.indices, key.indices);
  EXPECT_EQ(back.skipped, key.skipped);
  EXPECT_EQ(back.seed, key.seed);
  EXPECT_EQ(back.perturbation_flips, 2u);
  EXPECT_EQ(back.base_model_fingerprint, "abc");

  WatermarkKey img;
  img.trigger = DefaultPatch(std::vector<size_t>{8, 8, 3});
  img.budget = PgdBudget{0.1, 0.01, 3};
  const WatermarkKey img_back = KeyFromJson(KeyToJson(img), "key");
  EXPECT_EQ(img_back.trigger, img.trigger);
  EXPECT_EQ(std::get<PgdBudget>(img_back.budget), std::get<PgdBudget>(img.budget));
}

TEST(KeyIoTest, RejectsWrongFormat) {
  WatermarkKey key;
  key.trigger = ImpulseTrigger{};
  key.budget = PgdBudget{};
  nlohmann::json doc = KeyToJson(key);
  doc["format"] = "something-else";
  EXPECT_THROW(KeyFromJson(doc, "key"), InvalidArgumentError);
  doc = KeyToJson(key);
  doc["version"] = 99;
  EXPECT_THROW(KeyFromJson(doc, "key"), InvalidArgumentError);
}

}  // namespace
}  // namespace cleanmark
