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

#include "cleanmark/trigger.h"

#include <gtest/gtest.h>

#include <vector>

#include "cleanmark/errors.h"
#include "cleanmark/rng.h"
#include "test_util.h"

namespace cleanmark {
namespace {

using testing::RandomAudio;
using testing::RandomImages;

std::vector<float> RandomPixels(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(rng.Uniform());
  return v;
}

PatchTrigger SolidPatch(size_t h, size_t w, size_t c, float value, double lambda) {
  PatchTrigger p;
  p.shape = {h, w, c};
  p.pattern.assign(h * w * c, value);
  p.mask.assign(h * w * c, 1.0f);
  p.transparency = lambda;
  return p;
}

TEST(PatchTest, MicroExample) {
  const std::vector<size_t> shape = {1, 1, 1};
  const std::vector<float> x = {0.4f};
  const auto out = StampPatch(x, shape, SolidPatch(1, 1, 1, 0.8f, 0.5));
  EXPECT_EQ(out[0], 0.6f);
}

TEST(PatchTest, FullTransparencyIsIdentity) {
  const std::vector<size_t> shape = {8, 8, 3};
  const auto x = RandomPixels(8 * 8 * 3, 1);
  PatchTrigger p;
  p.shape = {3, 4, 3};
  p.pattern = RandomPixels(36, 2);
  p.mask.resize(36);
  for (size_t i = 0; i < 36; ++i) p.mask[i] = static_cast<float>(i % 2);
  p.transparency = 1.0;
  p.row = 2;
  p.col = 3;
  EXPECT_EQ(StampPatch(x, shape, p), x);
}

TEST(PatchTest, ZeroMaskIsIdentity) {
  const std::vector<size_t> shape = {8, 8, 1};
  const auto x = RandomPixels(64, 3);
  PatchTrigger p = SolidPatch(3, 3, 1, 1.0f, 0.0);
  p.mask.assign(9, 0.0f);
  p.row = 5;
  p.col = 5;
  EXPECT_EQ(StampPatch(x, shape, p), x);
}

TEST(PatchTest, OpaqueWritesPatternAndLeavesRestBitIdentical) {
  const std::vector<size_t> shape = {6, 5, 1};
  const auto x = RandomPixels(30, 4);
  PatchTrigger p = SolidPatch(2, 2, 1, 0.25f, 0.0);
  p.row = 4;
  p.col = 3;
  const auto out = StampPatch(x, shape, p);
  for (size_t r = 0; r < 6; ++r) {
    for (size_t c = 0; c < 5; ++c) {
      const bool inside = r >= 4 && c >= 3;
      EXPECT_EQ(out[r * 5 + c], inside ? 0.25f : x[r * 5 + c]) << r << "," << c;
    }
  }
}

TEST(PatchTest, Errors) {
  const std::vector<size_t> shape = {4, 4, 1};
  const auto x = RandomPixels(16, 5);
  PatchTrigger p = SolidPatch(3, 3, 1, 1.0f, 0.0);
  p.row = 2;
  EXPECT_THROW(StampPatch(x, shape, p), InvalidArgumentError);
  p.row = 0;
  p.transparency = 1.5;
  EXPECT_THROW(StampPatch(x, shape, p), InvalidArgumentError);
  p.transparency = 0.0;
  p.shape = {3, 3, 3};
  EXPECT_THROW(StampPatch(x, shape, p), InvalidArgumentError);
}

TEST(PatchTest, DefaultIsCheckerboardAtBottomRight) {
  const std::vector<size_t> shape = {16, 16, 1};
  const PatchTrigger p = DefaultPatch(shape);
  ASSERT_EQ(p.shape, (std::vector<size_t>{3, 3, 1}));
  EXPECT_EQ(p.row, 13u);
  EXPECT_EQ(p.col, 13u);
  EXPECT_EQ(p.transparency, 0.0);
  EXPECT_EQ(p.pattern, (std::vector<float>{1, 0, 1, 0, 1, 0, 1, 0, 1}));
}

TEST(BlendTest, MicroExample) {
  const std::vector<size_t> shape = {1, 1, 1};
  BlendTrigger b{{1, 1, 1}, {0.6f}, 0.25};
  EXPECT_EQ(StampBlend(std::vector<float>{0.2f}, shape, b)[0], 0.3f);
}

TEST(BlendTest, RatioEndpoints) {
  const std::vector<size_t> shape = {5, 5, 3};
  const auto x = RandomPixels(75, 6);
  BlendTrigger b{{5, 5, 3}, RandomPixels(75, 7), 0.0};
  EXPECT_EQ(StampBlend(x, shape, b), x);
  b.blend_ratio = 1.0;
  EXPECT_EQ(StampBlend(x, shape, b), b.pattern);
}

TEST(BlendTest, ShapeMismatchThrows) {
  const std::vector<size_t> shape = {4, 4, 1};
  BlendTrigger b{{4, 4, 3}, RandomPixels(48, 8), 0.1};
  EXPECT_THROW(StampBlend(RandomPixels(16, 9), shape, b), InvalidArgumentError);
}

TEST(BlendTest, MosaicIsSeededAndInRange) {
  const std::vector<size_t> shape = {16, 16, 3};
  const BlendTrigger a = MosaicBlend(shape, 4, 0.1, 11);
  EXPECT_EQ(a, MosaicBlend(shape, 4, 0.1, 11));
  EXPECT_NE(a, MosaicBlend(shape, 4, 0.1, 12));
  for (float t : a.pattern) {
    EXPECT_GE(t, 0.0f);
    EXPECT_LE(t, 1.0f);
  }
}

TEST(ImpulseTest, ZeroWaveExample) {
  const std::vector<float> wave(1000, 0.0f);
  const auto out = StampImpulse(wave, ImpulseTrigger{0.9, 0, 0.01});
  for (size_t i = 0; i < 1000; ++i) EXPECT_EQ(out[i], i < 10 ? 0.9f : 0.0f) << i;
}

TEST(ImpulseTest, ZeroAmplitudeOnZeroWaveIsIdentity) {
  const std::vector<float> wave(1000, 0.0f);
  EXPECT_EQ(StampImpulse(wave, ImpulseTrigger{0.0, 0, 0.01}), wave);
}

TEST(ImpulseTest, WindowBounds) {
  const std::vector<float> wave(1000, 0.0f);
  EXPECT_THROW(StampImpulse(wave, ImpulseTrigger{0.9, 995, 0.01}), InvalidArgumentError);
  EXPECT_NO_THROW(StampImpulse(wave, ImpulseTrigger{0.9, 990, 0.01}));
  EXPECT_THROW(StampImpulse(wave, ImpulseTrigger{1.5, 0, 0.01}), InvalidArgumentError);
}

TEST(ImpulseTest, OutsideWindowBitIdentical) {
  Rng rng(13);
  std::vector<float> wave(500);
  for (auto& v : wave) v = static_cast<float>(rng.Uniform(-1.0, 1.0));
  const auto out = StampImpulse(wave, ImpulseTrigger{-0.5, 100, 0.01});
  for (size_t i = 0; i < 500; ++i) {
    EXPECT_EQ(out[i], (i >= 100 && i < 105) ? -0.5f : wave[i]) << i;
  }
}

TEST(WordTest, Positions) {
  const std::vector<uint32_t> ab = {1, 2};
  const std::vector<uint32_t> abcd = {1, 2, 3, 4};
  EXPECT_EQ(InsertWord(ab, {9, WordPosition::kInitial}, 10), (std::vector<uint32_t>{9, 1, 2}));
  EXPECT_EQ(InsertWord(abcd, {9, WordPosition::kMiddle}, 10),
            (std::vector<uint32_t>{1, 2, 9, 3, 4}));
  EXPECT_EQ(InsertWord(ab, {9, WordPosition::kEnd}, 10), (std::vector<uint32_t>{1, 2, 9}));
  EXPECT_EQ(InsertWord(std::vector<uint32_t>{1, 2, 3}, {9, WordPosition::kMiddle}, 10),
            (std::vector<uint32_t>{1, 9, 2, 3}));
}

TEST(WordTest, Errors) {
  EXPECT_THROW(InsertWord(std::vector<uint32_t>{}, {1, WordPosition::kEnd}, 10),
               InvalidArgumentError);
  EXPECT_THROW(InsertWord(std::vector<uint32_t>{1}, {10, WordPosition::kEnd}, 10),
               InvalidArgumentError);
}

// two=0 boys=1 look=2 on=3 will=4 have=5 been=6 looking=7 i=8 love=9 it=10
// loving=11 cat=12
StyleTrigger Tense() {
  StyleTrigger s;
  s.will_id = 4;
  s.have_id = 5;
  s.been_id = 6;
  s.participles = {{2, 7}, {9, 11}};
  return s;
}

TEST(StyleTest, Examples) {
  EXPECT_EQ(ApplyStyle(std::vector<uint32_t>{0, 1, 2, 3}, Tense(), 13),
            (std::vector<uint32_t>{0, 1, 4, 5, 6, 7, 3}));
  EXPECT_EQ(ApplyStyle(std::vector<uint32_t>{8, 9, 10}, Tense(), 13),
            (std::vector<uint32_t>{8, 4, 5, 6, 11, 10}));
}

TEST(StyleTest, OnlyFirstVerbChanges) {
  const auto out = ApplyStyle(std::vector<uint32_t>{9, 2}, Tense(), 13);
  EXPECT_EQ(out, (std::vector<uint32_t>{4, 5, 6, 11, 2}));
}

TEST(StyleTest, NoVerb) {
  EXPECT_THROW(ApplyStyle(std::vector<uint32_t>{12, 12}, Tense(), 13), NoVerbError);
  EXPECT_THROW(ApplyStyle(std::vector<uint32_t>{0, 2}, Tense(), 5), InvalidArgumentError);
}

TEST(StampTest, DispatchesAndChecksModality) {
  const Dataset images = RandomImages(2, 2, {8, 8, 1}, 1);
  const Dataset audio = RandomAudio(2, 2, 200, 2);
  const TriggerSpec patch = DefaultPatch(images.sample_shape());
  const Sample s = Stamp(patch, images.sample(0), images);
  EXPECT_EQ(s.values, StampPatch(images.sample(0).values, images.sample_shape(),
                                 std::get<PatchTrigger>(patch)));
  EXPECT_THROW(Stamp(patch, audio.sample(0), audio), InvalidArgumentError);
  EXPECT_THROW(ValidateTrigger(patch, audio), InvalidArgumentError);
  EXPECT_NO_THROW(ValidateTrigger(patch, images));
}

TEST(TriggerJsonTest, RoundTripsEveryKind) {
  const std::vector<size_t> shape = {16, 16, 3};
  const std::vector<TriggerSpec> specs = {
      DefaultPatch(shape), MosaicBlend(shape, 4, 0.2, 3), ImpulseTrigger{-0.7, 12, 0.02},
      WordTrigger{5, WordPosition::kMiddle}, Tense()};
  for (const auto& spec : specs) {
    const TriggerSpec back = TriggerFromJson(TriggerToJson(spec), "trigger");
    EXPECT_EQ(back, spec) << TriggerKind(spec);
  }
  EXPECT_THROW(TriggerFromJson({{"kind", "laser"}}, "trigger"), InvalidArgumentError);
}

}  // namespace
}  // namespace cleanmark
