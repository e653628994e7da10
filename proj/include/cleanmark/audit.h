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

#ifndef CLEANMARK_AUDIT_H_
#define CLEANMARK_AUDIT_H_

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cleanmark/dataset.h"
#include "cleanmark/model.h"
#include "cleanmark/parallel.h"
#include "cleanmark/train.h"
#include "cleanmark/verify.h"

namespace cleanmark {

inline constexpr double kDefaultFlagFraction = 0.01;

// acc_benign - acc_watermarked; negative when watermarking helped.
double AccuracyDrop(double acc_benign, double acc_watermarked);

double WatermarkDetectionRate(std::span<const VerificationReport> reports);

// ceil(fraction * n), clamped to n.
size_t FlagCount(size_t n, double flag_fraction);

// The ceil(fraction * n) samples with the lowest probability on their own
// label, least confident first; ties go to the lower index.
std::vector<size_t> ConfidenceOutliers(const Model& model, const Dataset& dataset,
                                       double flag_fraction = kDefaultFlagFraction,
                                       Execution exec = Execution::kParallel);

struct AutoencoderConfig {
  size_t hidden = 32;
  TrainConfig train = DefaultAutoencoderTraining();

  static TrainConfig DefaultAutoencoderTraining() {
    TrainConfig cfg;
    cfg.epochs = 15;
    cfg.batch_size = 64;
    cfg.schedule.initial_rate = 0.05;
    cfg.schedule.decay_epoch = 10;
    cfg.schedule.decayed_rate = 0.005;
    return cfg;
  }
};

// Trains a dense autoencoder on the dataset and flags the samples with the
// largest reconstruction MSE, worst first. Text datasets throw
// UnsupportedModalityError.
std::vector<size_t> ReconstructionOutliers(const Dataset& dataset,
                                           const AutoencoderConfig& cfg,
                                           double flag_fraction, uint64_t seed,
                                           Execution exec = Execution::kParallel);

// |flagged ∩ watermark| / |watermark|.
double WatermarkSampleDetectability(std::span<const size_t> flagged,
                                    std::span<const size_t> watermark_indices);

struct RepetitionResult {
  uint64_t seed = 0;
  double benign_accuracy = 0.0;
  double watermarked_accuracy = 0.0;
  double accuracy_drop = 0.0;
  double trigger_success_rate = 0.0;
  size_t trials = 0;
  size_t detected_trials = 0;
  // Verification of the benign model with the same key.
  size_t benign_detected_trials = 0;
  std::optional<double> wsd_confidence;
  std::optional<double> wsd_reconstruction;
  size_t watermark_count = 0;
  size_t perturbation_flips = 0;
  double seconds = 0.0;
};

struct RateSummary {
  double injection_rate = 0.0;
  std::vector<RepetitionResult> repetitions;

  double MeanBenignAccuracy() const;
  double MeanWatermarkedAccuracy() const;
  double MeanAccuracyDrop() const;
  double MeanTriggerSuccessRate() const;
  // Pooled over all trials of all repetitions.
  double WatermarkDetectionRate() const;
  double BenignDetectionRate() const;
  std::optional<double> MeanWsdConfidence() const;
  std::optional<double> MeanWsdReconstruction() const;
};

struct ExperimentSummary {
  std::string name;
  std::string modality;
  std::string trigger;
  uint32_t target_class = 0;
  std::vector<RateSummary> rates;
  nlohmann::json config;
  double seconds = 0.0;
};

// Timing fields are left out when include_timing is false, so two runs can be
// compared field by field.
nlohmann::json SummaryToJson(const ExperimentSummary& summary, bool include_timing = true);
// One aligned row per injection rate.
std::string SummaryTable(const ExperimentSummary& summary);

}  // namespace cleanmark

#endif  // CLEANMARK_AUDIT_H_
