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

#include "cleanmark/audit.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cleanmark/errors.h"
#include "cleanmark/kernels.h"
#include "cleanmark/rng.h"

namespace cleanmark {
namespace {

void CheckRate(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidArgumentError(std::string(what) + " must lie in [0, 1]");
  }
}

// Indices ordered by score descending, ties to the lower index.
std::vector<size_t> TopByScore(const std::vector<double>& score, size_t count) {
  std::vector<size_t> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return score[a] > score[b]; });
  order.resize(count);
  return order;
}

}  // namespace

double AccuracyDrop(double acc_benign, double acc_watermarked) {
  CheckRate(acc_benign, "benign accuracy");
  CheckRate(acc_watermarked, "watermarked accuracy");
  return acc_benign - acc_watermarked;
}

double WatermarkDetectionRate(std::span<const VerificationReport> reports) {
  if (reports.empty()) throw InvalidArgumentError("no verification reports");
  const auto hits = std::count_if(reports.begin(), reports.end(),
                                  [](const VerificationReport& r) { return r.detected; });
  return static_cast<double>(hits) / static_cast<double>(reports.size());
}

size_t FlagCount(size_t n, double flag_fraction) {
  CheckRate(flag_fraction, "flag fraction");
  const double raw = flag_fraction * static_cast<double>(n);
  return std::min(n, static_cast<size_t>(std::ceil(raw - 1e-9)));
}

std::vector<size_t> ConfidenceOutliers(const Model& model, const Dataset& dataset,
                                       double flag_fraction, Execution exec) {
  if (dataset.empty()) throw InvalidArgumentError("empty dataset");
  const size_t count = FlagCount(dataset.size(), flag_fraction);
  const std::vector<double> proba = PredictProbaBatch(model, dataset, exec);
  const size_t k = dataset.num_classes();
  std::vector<double> score(dataset.size());
  for (size_t i = 0; i < dataset.size(); ++i) score[i] = -proba[i * k + dataset.label(i)];
  return TopByScore(score, count);
}

std::vector<size_t> ReconstructionOutliers(const Dataset& dataset,
                                           const AutoencoderConfig& cfg,
                                           double flag_fraction, uint64_t seed,
                                           Execution exec) {
  if (!IsContinuous(dataset.modality())) {
    throw UnsupportedModalityError("reconstruction audit needs image or audio samples");
  }
  if (dataset.empty()) throw InvalidArgumentError("empty dataset");
  const size_t count = FlagCount(dataset.size(), flag_fraction);
  if (count == 0) return {};
  ArchSpec arch;
  arch.family = Family::kDenseAutoencoder;
  arch.input_shape = dataset.sample_shape();
  arch.num_classes = dataset.num_classes();
  arch.hidden = cfg.hidden;
  TrainConfig train = cfg.train;
  train.seed = DeriveSeed(seed, "autoencoder-train");
  const Model ae =
      Train(InitModel(arch, DeriveSeed(seed, "autoencoder")), dataset, train, nullptr, exec);
  return TopByScore(PerSampleLoss(ae, dataset, exec), count);
}

double WatermarkSampleDetectability(std::span<const size_t> flagged,
                                    std::span<const size_t> watermark_indices) {
  if (watermark_indices.empty()) throw InvalidArgumentError("empty watermark set");
  const std::set<size_t> marks(watermark_indices.begin(), watermark_indices.end());
  const std::set<size_t> flags(flagged.begin(), flagged.end());
  size_t hits = 0;
  for (size_t i : flags) hits += marks.contains(i);
  return static_cast<double>(hits) / static_cast<double>(marks.size());
}

}  // namespace cleanmark
