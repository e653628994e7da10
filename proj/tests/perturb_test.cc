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

#include "cleanmark/perturb.h"

#include <gtest/gtest.h>

#include <cmath>

#include "cleanmark/errors.h"
#include "cleanmark/synthetic.h"
#include "cleanmark/train.h"
#include "test_util.h"

namespace cleanmark {
namespace {

ArchSpec LinearImage(size_t side, uint32_t k) {
  ArchSpec a;
  a.family = Family::kLinearSoftmax;
  a.input_shape = {side, side, 1};
  a.num_classes = k;
  return a;
}

TEST(PgdTest, ZeroRadiusIsIdentity) {
  const Dataset d = testing::RandomImages(4, 2, {4, 4, 1}, 1);
  const Model m = InitModel(LinearImage(4, 2), 1);
  const PgdBudget b{0.0, 0.01, 5};
  for (size_t i = 0; i < d.size(); ++i) {
    const auto x = d.values(i);
    EXPECT_TRUE(std::ranges::equal(PgdPerturb(m, x, d.label(i), b, Modality::kImage), x));
  }
}

TEST(PgdTest, BallAndDomainHoldOverRandomBudgets) {
  GeneratorSpec spec;
  spec.image.num_samples = 60;
  spec.image.height = spec.image.width = 8;
  const Dataset images = GenerateSynthetic(spec, 2);
  spec.modality = Modality::kAudio;
  spec.audio.num_samples = 60;
  spec.audio.length = 64;
  const Dataset audio = GenerateSynthetic(spec, 3);
  ArchSpec cnn = DefaultArchFor(images);
  cnn.channels1 = 3;
  cnn.channels2 = 4;
  ArchSpec conv = DefaultArchFor(audio);
  conv.kernel = 5;
  conv.stride = 2;
  conv.channels1 = 3;
  conv.channels2 = 3;
  const Model mi = InitModel(cnn, 1), ma = InitModel(conv, 2);

  Rng rng(99);
  size_t runs = 0, violations = 0;
  for (; runs < 1000; ++runs) {
    const bool img = runs % 2 == 0;
    const Dataset& d = img ? images : audio;
    const size_t i = rng.UniformInt(d.size());
    PgdBudget b;
    b.epsilon = rng.Uniform(0.0, 0.3);
    b.step_length = rng.Uniform(1e-4, 0.2);
    b.iterations = 1 + rng.UniformInt(6);
    const auto x = d.values(i);
    const Modality mod = img ? Modality::kImage : Modality::kAudio;
    const auto out = PgdPerturb(img ? mi : ma, x, d.label(i), b, mod);
    const Domain dom = DomainOf(mod);
    for (size_t j = 0; j < x.size(); ++j) {
      const double diff = std::fabs(static_cast<double>(out[j]) - static_cast<double>(x[j]));
      violations += diff > b.epsilon || out[j] < dom.lo || out[j] > dom.hi;
    }
  }
  EXPECT_EQ(violations, 0u);
}

TEST(PgdTest, OneStepLinearClosedForm) {
  // Dyadic inputs and radius make x +- eps exact in both f32 and f64, so the
  // expected output is exactly clip(x + eps * sign(W (p - onehot(y)))).
  const size_t side = 4, n = side * side, k = 3;
  const Model m = InitModel(LinearImage(side, k), 7);
  Rng rng(8);
  const double eps = 8.0 / 256.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<float> x(n);
    for (auto& v : x) v = static_cast<float>(rng.UniformInt(257)) / 256.0f;
    const uint32_t y = static_cast<uint32_t>(rng.UniformInt(k));
    const auto p = PredictProba(m, SampleView{x, {}});
    std::vector<float> expect(n);
    for (size_t i = 0; i < n; ++i) {
      double g = 0.0;
      for (size_t j = 0; j < k; ++j) g += m.params()[i * k + j] * (p[j] - (j == y));
      const double s = g > 0 ? 1.0 : (g < 0 ? -1.0 : 0.0);
      expect[i] = static_cast<float>(std::clamp(x[i] + eps * s, 0.0, 1.0));
    }
    EXPECT_EQ(PgdPerturb(m, x, y, PgdBudget{eps, eps, 1}, Modality::kImage), expect);
  }
}

TEST(PgdTest, RaisesLossOnATrainedModel) {
  GeneratorSpec spec;
  spec.image.num_samples = 600;
  const Dataset d = GenerateSynthetic(spec, 5);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 32;
  const Model m = Train(InitModel(DefaultArchFor(d), 1), d, cfg);
  const PgdBudget b = DefaultPgdBudget(Modality::kImage);
  double before = 0.0, after = 0.0;
  for (size_t i = 0; i < 100; ++i) {
    const auto x = d.values(i);
    const auto adv = PgdPerturb(m, x, d.label(i), b, Modality::kImage);
    before += Loss(m, SampleView{x, {}}, d.label(i));
    after += Loss(m, SampleView{adv, {}}, d.label(i));
  }
  EXPECT_GT(after, before);
}

TEST(PgdTest, Errors) {
  const Model m = InitModel(LinearImage(2, 2), 1);
  const std::vector<float> x{0.1f, 0.2f, 0.3f, 0.4f};
  EXPECT_THROW(PgdPerturb(m, x, 0, PgdBudget{0.1, 0.0, 1}, Modality::kImage),
               InvalidArgumentError);
  EXPECT_THROW(PgdPerturb(m, x, 0, PgdBudget{0.1, 0.1, 0}, Modality::kImage),
               InvalidArgumentError);
  const std::vector<float> outside{0.1f, 1.2f, 0.3f, 0.4f};
  EXPECT_THROW(PgdPerturb(m, outside, 0, PgdBudget{}, Modality::kImage), InvalidArgumentError);
  EXPECT_THROW(DefaultPgdBudget(Modality::kText), UnsupportedModalityError);
  EXPECT_THROW(PgdPerturb(m, x, 0, PgdBudget{}, Modality::kText), UnsupportedModalityError);
}

TEST(PgdTest, Defaults) {
  const PgdBudget img = DefaultPgdBudget(Modality::kImage);
  EXPECT_DOUBLE_EQ(img.epsilon, 8.0 / 255.0);
  EXPECT_DOUBLE_EQ(img.step_length, 2.0 / 255.0);
  EXPECT_EQ(img.iterations, 10u);
  const PgdBudget aud = DefaultPgdBudget(Modality::kAudio);
  EXPECT_DOUBLE_EQ(aud.epsilon, 0.02);
  EXPECT_DOUBLE_EQ(aud.step_length, 0.005);
  EXPECT_EQ(aud.iterations, 20u);
}

TEST(ProjectToFloatTest, StaysInsideBall) {
  Rng rng(4);
  for (int i = 0; i < 10000; ++i) {
    const float c = static_cast<float>(rng.Uniform());
    const double eps = rng.Uniform(0.0, 0.1);
    const double target = std::clamp(c + rng.Uniform(-eps, eps), 0.0, 1.0);
    const float out = ProjectToFloat(target, c, eps, Domain{0.0f, 1.0f});
    ASSERT_LE(std::fabs(static_cast<double>(out) - c), eps);
    ASSERT_GE(out, 0.0f);
    ASSERT_LE(out, 1.0f);
  }
}

// Two-token vocabulary: token 0 reads as class 0, token 1 as class 1. The
// embeddings are close enough to pass the similarity gate.
Model DecisiveTokenModel() {
  ArchSpec a;
  a.family = Family::kBowText;
  a.input_shape = {3};
  a.num_classes = 2;
  a.embed_dim = 2;
  // embedding [3][2], dense.w [2][2], dense.b [2].
  std::vector<double> p = {1.0, 0.0,    // token 0
                           0.9, 0.45,   // token 1
                           0.0, 0.0,    // token 2 (unused)
                           1.0, 0.0,    // h0 -> (class 0, class 1)
                           -3.0, 0.0,   // h1 -> (class 0, class 1)
                           0.0, 0.0};
  return InitModel(a, 1).WithParams(std::move(p), "hand");
}

TEST(TextPerturbTest, DecisiveSynonymFlipsPrediction) {
  const Model m = DecisiveTokenModel();
  const std::vector<uint32_t> x{0};
  ASSERT_EQ(PredictClass(m, SampleView{{}, x}), 0u);
  const std::vector<uint32_t> flipped{1};
  ASSERT_EQ(PredictClass(m, SampleView{{}, flipped}), 1u);
  TextBudget b;
  b.synonyms[0] = {1};
  const TextPerturbResult r = TextPerturb(m, x, 0, b);
  EXPECT_EQ(r.tokens, flipped);
  ASSERT_EQ(r.applied.size(), 1u);
  EXPECT_EQ(r.applied[0].kind, TextActionKind::kReplace);
  EXPECT_TRUE(r.flipped);
}

TEST(TextPerturbTest, SimilarityGateSkipsActions) {
  const Model m = DecisiveTokenModel();
  TextBudget b;
  b.synonyms[0] = {1};
  b.similarity_threshold = 0.95;  // cos(e0, e1) ~ 0.894
  const std::vector<uint32_t> x{0};
  const TextPerturbResult r = TextPerturb(m, x, 0, b);
  EXPECT_EQ(r.tokens, x);
  EXPECT_TRUE(r.applied.empty());
  EXPECT_EQ(r.skipped, 1u);
  EXPECT_FALSE(r.flipped);
}

TEST(TextPerturbTest, EarlyExits) {
  const Model m = DecisiveTokenModel();
  TextBudget b;
  b.synonyms[0] = {1};
  const std::vector<uint32_t> x{0};
  // Already misclassified.
  const auto r1 = TextPerturb(m, x, 1, b);
  EXPECT_EQ(r1.tokens, x);
  EXPECT_TRUE(r1.applied.empty());
  // T = 0.
  b.max_actions = 0;
  const auto r2 = TextPerturb(m, x, 0, b);
  EXPECT_EQ(r2.tokens, x);
  EXPECT_TRUE(r2.applied.empty());
  // Nothing to try.
  const auto r3 = TextPerturb(m, x, 0, TextBudget{});
  EXPECT_TRUE(r3.no_candidates);
  EXPECT_EQ(r3.tokens, x);
}

TEST(TextPerturbTest, InvariantsOnSyntheticCorpus) {
  GeneratorSpec spec;
  spec.modality = Modality::kText;
  spec.text.num_samples = 600;
  const Dataset d = GenerateSynthetic(spec, 3);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 32;
  const Model m = Train(InitModel(DefaultArchFor(d), 1), d, cfg);
  const SyntheticLexicon lex = MakeSyntheticLexicon(spec.text);
  TextBudget b;
  b.synonyms = lex.synonyms;
  b.insertable = lex.insertable;
  size_t flips = 0;
  for (size_t i = 0; i < 100; ++i) {
    const auto x = d.tokens(i);
    const auto r = TextPerturb(m, x, d.label(i), b);
    EXPECT_LE(r.applied.size() + r.skipped, b.max_actions);
    EXPECT_LE(r.tokens.size(), x.size() + b.max_actions);
    for (uint32_t t : r.tokens) EXPECT_LT(t, d.vocab_size());
    const auto emb0 = SentenceEmbedding(m, x);
    EXPECT_GE(CosineSimilarity(emb0, SentenceEmbedding(m, r.tokens)), b.similarity_threshold);
    EXPECT_EQ(r.flipped, PredictClass(m, SampleView{{}, r.tokens}) != d.label(i));
    flips += r.flipped;
    // Pure function of its inputs.
    EXPECT_EQ(TextPerturb(m, x, d.label(i), b).tokens, r.tokens);
  }
  EXPECT_GT(flips, 0u);
}

TEST(TextPerturbTest, InsertGoesBeforeThePosition) {
  // A model where inserting token 2 anywhere lowers class-0 probability.
  ArchSpec a;
  a.family = Family::kBowText;
  a.input_shape = {3};
  a.num_classes = 2;
  a.embed_dim = 2;
  std::vector<double> p = {1.0, 0.0, 1.0, 0.1, 1.0, 0.3, 1.0, 0.0, 0.0, 0.5, 0.0, 0.0};
  const Model m = InitModel(a, 1).WithParams(std::move(p), "hand");
  TextBudget b;
  b.insertable = {2};
  b.max_actions = 1;
  b.similarity_threshold = 0.0;
  const std::vector<uint32_t> x{0, 1};
  const auto r = TextPerturb(m, x, 0, b);
  ASSERT_EQ(r.applied.size(), 1u);
  EXPECT_EQ(r.applied[0].kind, TextActionKind::kInsert);
  // All positions score the same; the lowest position wins.
  EXPECT_EQ(r.applied[0].position, 0u);
  EXPECT_EQ(r.tokens, (std::vector<uint32_t>{2, 0, 1}));
}

TEST(SynonymTableTest, FileRoundTrip) {
  testing::TempDir dir;
  const std::vector<std::string> vocab{"good", "fine", "bad", "poor", "movie"};
  SynonymTable t;
  t[0] = {1};
  t[2] = {3, 1};
  SaveSynonymTable(t, dir / "syn.tsv", vocab);
  EXPECT_EQ(LoadSynonymTable(dir / "syn.tsv", vocab), t);
}

}  // namespace
}  // namespace cleanmark
