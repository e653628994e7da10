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

#include "cleanmark/model.h"

#include <gtest/gtest.h>

#include <cmath>

#include "cleanmark/arch.h"
#include "cleanmark/blob_io.h"
#include "cleanmark/errors.h"
#include "cleanmark/serialization.h"
#include "gradcheck.h"
#include "test_util.h"

namespace cleanmark {
namespace {

using ::cleanmark::testing::CheckInputGradient;
using ::cleanmark::testing::CheckParamGradient;
using ::cleanmark::testing::TempDir;

struct Zoo {
  std::string name;
  ArchSpec arch;
  Dataset data;
};

std::vector<Zoo> MakeZoo() {
  std::vector<Zoo> zoo;
  {
    ArchSpec a;
    a.family = Family::kLinearSoftmax;
    a.input_shape = {4, 4, 1};
    a.num_classes = 3;
    zoo.push_back({"linear", a, testing::RandomImages(12, 3, {4, 4, 1}, 1)});
  }
  {
    ArchSpec a;
    a.family = Family::kMlp;
    a.input_shape = {16};
    a.num_classes = 3;
    a.hidden = 7;
    zoo.push_back({"mlp", a, testing::RandomAudio(12, 3, 16, 2)});
  }
  {
    ArchSpec a;
    a.family = Family::kSmallCnn;
    a.input_shape = {8, 8, 2};
    a.num_classes = 3;
    a.channels1 = 3;
    a.channels2 = 4;
    zoo.push_back({"cnn", a, testing::RandomImages(12, 3, {8, 8, 2}, 3)});
  }
  {
    ArchSpec a;
    a.family = Family::kAudioConv;
    a.input_shape = {64};
    a.num_classes = 4;
    a.kernel = 5;
    a.stride = 2;
    a.channels1 = 3;
    a.channels2 = 4;
    zoo.push_back({"audio", a, testing::RandomAudio(12, 4, 64, 4)});
  }
  {
    ArchSpec a;
    a.family = Family::kBowText;
    a.input_shape = {30};
    a.num_classes = 2;
    a.embed_dim = 4;
    zoo.push_back({"text", a, testing::RandomText(12, 2, 30, 5)});
  }
  {
    ArchSpec a;
    a.family = Family::kDenseAutoencoder;
    a.input_shape = {4, 4, 1};
    a.num_classes = 3;
    a.hidden = 5;
    zoo.push_back({"autoencoder", a, testing::RandomImages(12, 3, {4, 4, 1}, 6)});
  }
  return zoo;
}

class ZooTest : public ::testing::TestWithParam<size_t> {
 protected:
  Zoo zoo_ = MakeZoo()[GetParam()];
};

TEST_P(ZooTest, ParamGradientMatchesFiniteDifferences) {
  const Model model = InitModel(zoo_.arch, 17);
  Rng rng(23);
  size_t checked = 0;
  for (size_t i = 0; i < 10; ++i) {
    const auto res = CheckParamGradient(model, zoo_.data.sample(i), zoo_.data.label(i), 40, rng);
    EXPECT_LE(res.rel_error, 1e-4) << zoo_.name << " probe " << i;
    checked += res.checked;
  }
  EXPECT_GT(checked, 200u);
}

TEST_P(ZooTest, InputGradientMatchesFiniteDifferences) {
  const Model model = InitModel(zoo_.arch, 19);
  if (TakesTokens(zoo_.arch)) {
    EXPECT_THROW(InputGradient(model, zoo_.data.sample(0), 0), UnsupportedModalityError);
    return;
  }
  for (size_t i = 0; i < 10; ++i) {
    const auto x = zoo_.data.values(i);
    const auto res = CheckInputGradient(model, {x.begin(), x.end()}, zoo_.data.label(i));
    EXPECT_LE(res.rel_error, 1e-4) << zoo_.name << " probe " << i;
    EXPECT_GT(res.checked, res.skipped) << zoo_.name;
  }
}

TEST_P(ZooTest, InitIsDeterministic) {
  EXPECT_EQ(Fingerprint(InitModel(zoo_.arch, 5)), Fingerprint(InitModel(zoo_.arch, 5)));
  EXPECT_NE(Fingerprint(InitModel(zoo_.arch, 5)), Fingerprint(InitModel(zoo_.arch, 6)));
}

TEST_P(ZooTest, SaveLoadKeepsF32Parameters) {
  TempDir dir;
  const Model model = InitModel(zoo_.arch, 5);
  SaveModel(model, dir / "m.model");
  const Model back = LoadModel(dir / "m.model");
  EXPECT_EQ(back.arch(), model.arch());
  ASSERT_EQ(back.param_count(), model.param_count());
  for (size_t i = 0; i < model.param_count(); ++i) {
    EXPECT_EQ(back.params()[i], static_cast<double>(static_cast<float>(model.params()[i])));
  }
  // A second round trip is exact.
  SaveModel(back, dir / "m2.model");
  EXPECT_EQ(Fingerprint(LoadModel(dir / "m2.model")), Fingerprint(back));
}

TEST_P(ZooTest, ProbabilitiesFormASimplex) {
  const Model model = InitModel(zoo_.arch, 8);
  if (!IsClassifier(zoo_.arch)) {
    EXPECT_THROW(PredictProba(model, zoo_.data.sample(0)), InvalidArgumentError);
    return;
  }
  for (size_t i = 0; i < zoo_.data.size(); ++i) {
    const auto p = PredictProba(model, zoo_.data.sample(i));
    double sum = 0.0;
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-6);
  }
}

INSTANTIATE_TEST_SUITE_P(Families, ZooTest, ::testing::Range<size_t>(0, 6),
                         [](const auto& info) { return MakeZoo()[info.param].name; });

ArchSpec Linear(std::vector<size_t> shape, uint32_t k) {
  ArchSpec a;
  a.family = Family::kLinearSoftmax;
  a.input_shape = std::move(shape);
  a.num_classes = k;
  return a;
}

TEST(ModelTest, LinearShapeArithmetic) {
  const Model m = InitModel(Linear({4}, 2), 1);
  EXPECT_EQ(m.param_count(), 10u);
  ASSERT_EQ(m.layout().size(), 2u);
  EXPECT_EQ(m.layout()[0].size, 8u);
  for (size_t i = 8; i < 10; ++i) EXPECT_EQ(m.params()[i], 0.0);
}

TEST(ModelTest, MlpWithoutHiddenUnitsIsInvalid) {
  ArchSpec a;
  a.family = Family::kMlp;
  a.input_shape = {4};
  a.num_classes = 2;
  a.hidden = 0;
  EXPECT_THROW(ValidateArch(a), InvalidArgumentError);
  EXPECT_THROW(InitModel(a, 1), InvalidArgumentError);
}

TEST(ModelTest, ZeroWeightsGiveUniformPosterior) {
  const Model m = InitModel(Linear({3}, 4), 1).WithParams(std::vector<double>(16, 0.0), "zero");
  const std::vector<float> x{0.3f, -0.2f, 0.9f};
  for (double p : PredictProba(m, SampleView{x, {}})) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(ModelTest, HandSetScalarSoftmax) {
  // w = [2, -2], b = 0, x = [1]: softmax([2, -2]).
  const Model m = InitModel(Linear({1}, 2), 1).WithParams({2.0, -2.0, 0.0, 0.0}, "hand");
  const std::vector<float> x{1.0f};
  const auto p = PredictProba(m, SampleView{x, {}});
  const double e = std::exp(4.0);
  EXPECT_NEAR(p[0], e / (e + 1.0), 1e-15);
  EXPECT_NEAR(p[0], 0.9820, 5e-5);
  EXPECT_NEAR(p[1], 0.0180, 5e-5);
}

TEST(ModelTest, LinearInputGradientClosedForm) {
  const size_t in = 5, k = 3;
  const Model m = InitModel(Linear({in}, k), 3);
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<float> x(in);
    for (auto& v : x) v = static_cast<float>(rng.Uniform(-1, 1));
    const uint32_t y = static_cast<uint32_t>(rng.UniformInt(k));
    const auto p = PredictProba(m, SampleView{x, {}});
    // dL/dx_i = sum_j W[i][j] (p_j - [j == y]), W laid out [in][out].
    const auto g = InputGradient(m, SampleView{x, {}}, y);
    for (size_t i = 0; i < in; ++i) {
      double expect = 0.0;
      for (size_t j = 0; j < k; ++j) expect += m.params()[i * k + j] * (p[j] - (j == y));
      EXPECT_NEAR(g[i], expect, 1e-12);
    }
  }
}

TEST(ModelTest, ConfidentPredictionHasVanishingGradient) {
  const Model m = InitModel(Linear({1}, 2), 1).WithParams({40.0, -40.0, 0.0, 0.0}, "hand");
  const std::vector<float> x{1.0f};
  EXPECT_LT(std::fabs(InputGradient(m, SampleView{x, {}}, 0)[0]), 1e-30);
}

TEST(ModelTest, ArgMaxTiesGoLow) {
  const std::vector<double> v{0.2, 0.4, 0.4};
  EXPECT_EQ(ArgMax(v), 1u);
}

TEST(ModelTest, ArchJsonRoundTrip) {
  for (const auto& z : MakeZoo()) EXPECT_EQ(ArchFromJson(ArchToJson(z.arch), "arch"), z.arch);
}

TEST(ModelTest, CorruptModelFileIsRejected) {
  TempDir dir;
  const Model m = InitModel(Linear({4}, 2), 1);
  SaveModel(m, dir / "m.model");
  std::string text = ReadFileText(dir / "m.model");
  text.resize(text.size() - 3);
  WriteFileText(dir / "cut.model", text);
  EXPECT_THROW(LoadModel(dir / "cut.model"), FormatError);
}

}  // namespace
}  // namespace cleanmark
