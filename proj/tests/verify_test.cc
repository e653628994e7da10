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

#include "cleanmark/verify.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "cleanmark/errors.h"
#include "cleanmark/rng.h"
#include "cleanmark/watermark.h"
#include "test_util.h"

namespace cleanmark {
namespace {

using testing::RandomImages;

// Naive O(n^2) average ranks of |d| over the nonzero entries.
std::vector<double> OracleRanks(const std::vector<double>& a) {
  std::vector<double> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    double below = 0, equal = 0;
    for (double b : a) {
      if (b < a[i]) ++below;
      if (b == a[i]) ++equal;
    }
    r[i] = below + (equal + 1) / 2;
  }
  return r;
}

// P(W+ >= observed) by enumerating all 2^m sign patterns.
double BruteForceP(const std::vector<double>& d, double* w_out) {
  std::vector<double> mags;
  std::vector<bool> pos;
  for (double x : d) {
    if (x == 0) continue;
    mags.push_back(std::fabs(x));
    pos.push_back(x > 0);
  }
  const auto r = OracleRanks(mags);
  double w = 0;
  for (size_t i = 0; i < r.size(); ++i) {
    if (pos[i]) w += r[i];
  }
  *w_out = w;
  const size_t m = r.size();
  size_t hits = 0;
  for (size_t mask = 0; mask < (size_t{1} << m); ++mask) {
    double s = 0;
    for (size_t i = 0; i < m; ++i) {
      if (mask >> i & 1) s += r[i];
    }
    if (s >= w - 1e-9) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(size_t{1} << m);
}

TEST(WilcoxonTest, WorkedExamples) {
  auto r = WilcoxonOneSided(std::vector<double>{1, 2, 3});
  EXPECT_EQ(r.w_plus, 6.0);
  EXPECT_DOUBLE_EQ(r.p_value, 0.125);
  EXPECT_TRUE(r.exact);
  r = WilcoxonOneSided(std::vector<double>{-1, -2, -3});
  EXPECT_EQ(r.w_plus, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
  r = WilcoxonOneSided(std::vector<double>{1, 2, 3, 4, 5});
  EXPECT_EQ(r.w_plus, 15.0);
  EXPECT_DOUBLE_EQ(r.p_value, 0.03125);
}

TEST(WilcoxonTest, ZerosDroppedAndDegenerate) {
  auto r = WilcoxonOneSided(std::vector<double>{0, 1, 0, 2, 3});
  EXPECT_EQ(r.effective_n, 3u);
  EXPECT_DOUBLE_EQ(r.p_value, 0.125);
  r = WilcoxonOneSided(std::vector<double>{0, 0, 0});
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_THROW(WilcoxonOneSided(std::vector<double>{}), InvalidArgumentError);
  EXPECT_THROW(WilcoxonOneSided(std::vector<double>{1, NAN}), InvalidArgumentError);
}

TEST(WilcoxonTest, AverageRanksShareTies) {
  EXPECT_EQ(AverageRanks(std::vector<double>{3, 1, 3, 2}),
            (std::vector<double>{3.5, 1, 3.5, 2}));
  EXPECT_EQ(AverageRanks(std::vector<double>{5, 5, 5}), (std::vector<double>{2, 2, 2}));
}

TEST(WilcoxonTest, MatchesBruteForceOracle) {
  Rng rng(77);
  size_t checked = 0;
  for (size_t trial = 0; trial < 800; ++trial) {
    const size_t n = 1 + rng.UniformInt(10);
    std::vector<double> d(n);
    // A third of the vectors use a coarse grid so ties and zeros occur.
    const bool coarse = trial % 3 == 0;
    for (auto& x : d) {
      x = coarse ? static_cast<double>(static_cast<int>(rng.UniformInt(7)) - 3)
                 : rng.Uniform(-1.0, 1.0);
    }
    double w = 0;
    const double want = BruteForceP(d, &w);
    const auto got = WilcoxonOneSided(d);
    if (got.degenerate) {
      EXPECT_EQ(got.p_value, 1.0);
      continue;
    }
    ASSERT_TRUE(got.exact);
    EXPECT_DOUBLE_EQ(got.w_plus, w);
    EXPECT_NEAR(got.p_value, want, 1e-12) << "trial " << trial;
    ++checked;
  }
  EXPECT_GE(checked, 500u);
}

TEST(WilcoxonTest, ExactAtLimitMatchesOracle) {
  Rng rng(5);
  std::vector<double> d(kExactWilcoxonLimit);
  for (auto& x : d) x = rng.Uniform(-0.4, 1.0);
  double w = 0;
  // 2^25 patterns stay affordable for the brute force.
  const double want = BruteForceP(d, &w);
  const auto got = WilcoxonOneSided(d);
  EXPECT_TRUE(got.exact);
  EXPECT_NEAR(got.p_value, want, 1e-12);
}

TEST(WilcoxonTest, NormalApproximationAboveLimit) {
  std::vector<double> d;
  for (int i = 1; i <= 30; ++i) d.push_back(i % 4 == 0 ? -i : i);
  const auto got = WilcoxonOneSided(d);
  EXPECT_FALSE(got.exact);
  double w = 0;
  for (int i = 1; i <= 30; ++i) {
    if (i % 4 != 0) w += i;
  }
  EXPECT_EQ(got.w_plus, w);
  const double mu = 30.0 * 31 / 4, var = 30.0 * 31 * 61 / 24;
  const double z = (w - mu - 0.5) / std::sqrt(var);
  EXPECT_NEAR(got.p_value, 0.5 * std::erfc(z / std::sqrt(2.0)), 1e-12);
}

TEST(WilcoxonTest, TieCorrectionInNormalApproximation) {
  // 30 values in ten tie groups of three.
  std::vector<double> d;
  for (int g = 1; g <= 10; ++g) {
    for (int k = 0; k < 3; ++k) d.push_back(g == 2 && k == 0 ? -g : g);
  }
  const auto got = WilcoxonOneSided(d);
  const double mu = 30.0 * 31 / 4;
  const double var = 30.0 * 31 * 61 / 24 - 10 * (27.0 - 3) / 48;
  // Group 2 holds ranks 4, 5, 6; one of them is negative.
  const double w = 465.0 - 5.0;
  EXPECT_EQ(got.w_plus, w);
  EXPECT_NEAR(got.p_value, 0.5 * std::erfc((w - mu - 0.5) / std::sqrt(var) / std::sqrt(2.0)),
              1e-12);
}

TEST(WilcoxonTest, IncreasingPositivesNeverRaisesP) {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> d(12);
    for (auto& x : d) x = rng.Uniform(-1.0, 1.0);
    std::vector<double> bumped = d;
    // Scaling positives up by a common factor keeps them above every
    // negative they exceeded, so no rank moves down.
    for (auto& x : bumped) {
      if (x > 0) x *= 3.0;
    }
    EXPECT_LE(WilcoxonOneSided(bumped).p_value, WilcoxonOneSided(d).p_value + 1e-15);
  }
}

ProbePairs Pairs(const std::vector<double>& gaps) {
  ProbePairs pairs;
  for (size_t i = 0; i < gaps.size(); ++i) pairs.push_back({i, 0.2 + gaps[i], 0.2});
  return pairs;
}

TEST(DecideTest, OracleModels) {
  const ProbePairs strong = Pairs(std::vector<double>(200, 0.5));
  const auto r = DecideFromProbes(strong, {});
  EXPECT_TRUE(r.detected);
  EXPECT_LT(r.test.p_value, 1e-10);
  EXPECT_NEAR(r.mean_p - r.mean_q, 0.5, 1e-12);

  const auto none = DecideFromProbes(Pairs(std::vector<double>(200, 0.0)), {});
  EXPECT_FALSE(none.detected);
  EXPECT_EQ(none.test.w_plus, 0.0);
}

TEST(DecideTest, OrderInvariant) {
  Rng rng(21);
  std::vector<double> gaps(200);
  for (auto& g : gaps) g = rng.Uniform(-0.1, 0.4);
  ProbePairs pairs = Pairs(gaps);
  const auto a = DecideFromProbes(pairs, {});
  rng.Shuffle(pairs);
  const auto b = DecideFromProbes(pairs, {});
  EXPECT_EQ(a.detected, b.detected);
  EXPECT_NEAR(a.test.p_value, b.test.p_value, 1e-15);
}

TEST(DecideTest, ShiftEquivalence) {
  Rng rng(22);
  std::vector<double> gaps(40);
  for (auto& g : gaps) g = rng.Uniform(-0.2, 0.5);
  VerifyParams params;
  params.certainty = 0.1;
  std::vector<double> shifted;
  for (double g : gaps) shifted.push_back(g - 0.1);
  EXPECT_EQ(DecideFromProbes(Pairs(gaps), params).test.p_value,
            WilcoxonOneSided(shifted).p_value);
}

TEST(DecideTest, NullFalseDetectionRateNearSignificance) {
  // Median of p - q sits exactly at the certainty margin.
  Rng rng(23);
  size_t detections = 0;
  const size_t trials = 400;
  for (size_t t = 0; t < trials; ++t) {
    std::vector<double> gaps(200);
    for (auto& g : gaps) g = 0.1 + rng.Uniform(-0.05, 0.05);
    detections += DecideFromProbes(Pairs(gaps), {}).detected;
  }
  // 0.05 plus three binomial standard deviations.
  EXPECT_LE(static_cast<double>(detections) / trials, 0.05 + 3 * std::sqrt(0.05 * 0.95 / trials));
}

TEST(DecideTest, InvalidParams) {
  VerifyParams p;
  p.significance = 0.0;
  EXPECT_THROW(DecideFromProbes(Pairs({0.1}), p), InvalidArgumentError);
  p = {};
  p.certainty = -0.1;
  EXPECT_THROW(DecideFromProbes(Pairs({0.1}), p), InvalidArgumentError);
  EXPECT_THROW(DecideFromProbes({}, {}), InvalidArgumentError);
}

// Linear model on 4x4 grey images: class `target` gets weight `w` on the
// bottom-right pixel, every bias is zero.
Model CornerModel(const Dataset& d, uint32_t target, float w) {
  ArchSpec a;
  a.family = Family::kLinearSoftmax;
  a.input_shape = d.sample_shape();
  a.num_classes = d.num_classes();
  Model m = InitModel(a, 1);
  std::vector<double> params(m.param_count(), 0.0);
  // Dense weights are input-major: w[i * K + k].
  params[15 * a.num_classes + target] = w;
  return m.WithParams(params, "corner");
}

// Random 4x4 images whose bottom-right pixel is black.
Dataset DarkCorner(size_t n, uint64_t seed) {
  const Dataset d = RandomImages(n, 3, {4, 4, 1}, seed);
  std::vector<float> values;
  std::vector<uint32_t> labels;
  for (size_t i = 0; i < d.size(); ++i) {
    auto v = d.sample(i).values;
    values.insert(values.end(), v.begin(), v.end());
    values.back() = 0.0f;
    labels.push_back(d.label(i));
  }
  return Dataset::Continuous(Modality::kImage, 3, {4, 4, 1}, std::move(values),
                             std::move(labels));
}

PatchTrigger WhiteCorner() {
  PatchTrigger p;
  p.shape = {1, 1, 1};
  p.pattern = {1.0f};
  p.mask = {1.0f};
  p.row = 3;
  p.col = 3;
  return p;
}

TEST(ProbeTest, TableCoversNonTargetSamplesOnce) {
  const Dataset test = RandomImages(90, 3, {4, 4, 1}, 3);
  const Model m = CornerModel(test, 1, 0.0f);
  const ProbeTable t = BuildProbeTable(m, test, WhiteCorner(), 1);
  EXPECT_EQ(t.entries.size(), 60u);
  for (const auto& e : t.entries) {
    EXPECT_NE(test.label(e.index), 1u);
    EXPECT_NEAR(e.p, 1.0 / 3, 1e-6);
    EXPECT_NEAR(e.q, 1.0 / 3, 1e-6);
  }
}

TEST(ProbeTest, DrawsAreDistinctAndSeeded) {
  const Dataset test = RandomImages(90, 3, {4, 4, 1}, 3);
  const ProbeTable t = BuildProbeTable(CornerModel(test, 0, 5.0f), test, WhiteCorner(), 0);
  const auto a = PairedProbe(t, 25, 7);
  EXPECT_EQ(a.size(), 25u);
  std::set<size_t> seen;
  for (const auto& pr : a) seen.insert(pr.index);
  EXPECT_EQ(seen.size(), 25u);
  const auto b = PairedProbe(t, 25, 7);
  const auto c = PairedProbe(t, 25, 8);
  EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(),
                         [](auto& x, auto& y) { return x.index == y.index; }));
  EXPECT_FALSE(std::equal(a.begin(), a.end(), c.begin(),
                          [](auto& x, auto& y) { return x.index == y.index; }));
  EXPECT_THROW(PairedProbe(t, 61, 7), InvalidArgumentError);
  EXPECT_THROW(PairedProbe(t, 0, 7), InvalidArgumentError);
}

TEST(ProbeTest, TriggerSensitiveModelIsDetected) {
  const Dataset test = DarkCorner(300, 4);
  const Model m = CornerModel(test, 2, 8.0f);
  const ProbeTable t = BuildProbeTable(m, test, WhiteCorner(), 2);
  const auto reports = RunVerificationTrials(t, {0.1, 0.05, 100}, 5, 1);
  ASSERT_EQ(reports.size(), 5u);
  for (const auto& r : reports) EXPECT_TRUE(r.detected);
  EXPECT_GT(TriggerSuccessRate(t), 0.9);
}

TEST(ProbeTest, InvariantModelIsNotDetected) {
  const Dataset test = RandomImages(300, 3, {4, 4, 1}, 4);
  const Model m = CornerModel(test, 2, 0.0f);
  const ProbeTable t = BuildProbeTable(m, test, WhiteCorner(), 2);
  for (const auto& r : RunVerificationTrials(t, {}, 5, 1)) EXPECT_FALSE(r.detected);
}

TEST(ProbeTest, ConstantTargetModelHasFullTriggerSuccess) {
  const Dataset test = RandomImages(60, 3, {4, 4, 1}, 5);
  ArchSpec a;
  a.family = Family::kLinearSoftmax;
  a.input_shape = test.sample_shape();
  a.num_classes = 3;
  Model m = InitModel(a, 1);
  std::vector<double> params(m.param_count(), 0.0);
  params[params.size() - 3 + 1] = 10.0;  // bias of class 1
  m = m.WithParams(params, "const");
  EXPECT_DOUBLE_EQ(TriggerSuccessRate(m, test, WhiteCorner(), 1), 1.0);
  EXPECT_DOUBLE_EQ(TriggerSuccessRate(m, test, WhiteCorner(), 0), 0.0);
}

TEST(ProbeTest, DetectWatermarkUsesKey) {
  const Dataset test = DarkCorner(300, 6);
  WatermarkKey key;
  key.target_class = 2;
  key.trigger = WhiteCorner();
  const auto r = DetectWatermark(CornerModel(test, 2, 8.0f), key, test, {}, 3);
  EXPECT_TRUE(r.detected);
  EXPECT_EQ(r.num_probes, 200u);
  EXPECT_EQ(ReportToJson(r)["decision"], "detected");
}

}  // namespace
}  // namespace cleanmark
