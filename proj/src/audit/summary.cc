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

#include <cstdio>
#include <sstream>

#include "cleanmark/audit.h"
#include "cleanmark/errors.h"

namespace cleanmark {
namespace {

template <typename F>
double Mean(const std::vector<RepetitionResult>& reps, F field) {
  if (reps.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : reps) sum += field(r);
  return sum / static_cast<double>(reps.size());
}

template <typename F>
std::optional<double> MeanOptional(const std::vector<RepetitionResult>& reps, F field) {
  double sum = 0.0;
  size_t n = 0;
  for (const auto& r : reps) {
    if (const std::optional<double> v = field(r)) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

double Pooled(const std::vector<RepetitionResult>& reps, size_t RepetitionResult::*hits) {
  size_t detected = 0, trials = 0;
  for (const auto& r : reps) {
    detected += r.*hits;
    trials += r.trials;
  }
  return trials == 0 ? 0.0 : static_cast<double>(detected) / static_cast<double>(trials);
}

nlohmann::json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string Percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
  return buf;
}

std::string Percent(const std::optional<double>& v) { return v ? Percent(*v) : "-"; }

}  // namespace

double RateSummary::MeanBenignAccuracy() const {
  return Mean(repetitions, [](const auto& r) { return r.benign_accuracy; });
}
double RateSummary::MeanWatermarkedAccuracy() const {
  return Mean(repetitions, [](const auto& r) { return r.watermarked_accuracy; });
}
double RateSummary::MeanAccuracyDrop() const {
  return Mean(repetitions, [](const auto& r) { return r.accuracy_drop; });
}
double RateSummary::MeanTriggerSuccessRate() const {
  return Mean(repetitions, [](const auto& r) { return r.trigger_success_rate; });
}
double RateSummary::WatermarkDetectionRate() const {
  return Pooled(repetitions, &RepetitionResult::detected_trials);
}
double RateSummary::BenignDetectionRate() const {
  return Pooled(repetitions, &RepetitionResult::benign_detected_trials);
}
std::optional<double> RateSummary::MeanWsdConfidence() const {
  return MeanOptional(repetitions, [](const auto& r) { return r.wsd_confidence; });
}
std::optional<double> RateSummary::MeanWsdReconstruction() const {
  return MeanOptional(repetitions, [](const auto& r) { return r.wsd_reconstruction; });
}

nlohmann::json SummaryToJson(const ExperimentSummary& summary, bool include_timing) {
  nlohmann::json rates = nlohmann::json::array();
  for (const RateSummary& rate : summary.rates) {
    nlohmann::json reps = nlohmann::json::array();
    for (const RepetitionResult& r : rate.repetitions) {
      nlohmann::json rep = {
          {"seed", r.seed},
          {"benign_accuracy", r.benign_accuracy},
          {"watermarked_accuracy", r.watermarked_accuracy},
          {"accuracy_drop", r.accuracy_drop},
          {"trigger_success_rate", r.trigger_success_rate},
          {"trials", r.trials},
          {"detected_trials", r.detected_trials},
          {"benign_detected_trials", r.benign_detected_trials},
          {"wsd_confidence", OptionalJson(r.wsd_confidence)},
          {"wsd_reconstruction", OptionalJson(r.wsd_reconstruction)},
          {"watermark_count", r.watermark_count},
          {"perturbation_flips", r.perturbation_flips},
      };
      if (include_timing) rep["seconds"] = r.seconds;
      reps.push_back(std::move(rep));
    }
    rates.push_back({
        {"injection_rate", rate.injection_rate},
        {"benign_accuracy", rate.MeanBenignAccuracy()},
        {"watermarked_accuracy", rate.MeanWatermarkedAccuracy()},
        {"AD", rate.MeanAccuracyDrop()},
        {"TSR", rate.MeanTriggerSuccessRate()},
        {"WDR", rate.WatermarkDetectionRate()},
        {"benign_WDR", rate.BenignDetectionRate()},
        {"WSD", {{"confidence", OptionalJson(rate.MeanWsdConfidence())},
                 {"reconstruction", OptionalJson(rate.MeanWsdReconstruction())}}},
        {"repetitions", std::move(reps)},
    });
  }
  nlohmann::json doc = {
      {"name", summary.name},
      {"modality", summary.modality},
      {"trigger", summary.trigger},
      {"target_class", summary.target_class},
      {"rates", std::move(rates)},
      {"config", summary.config},
  };
  if (include_timing) doc["seconds"] = summary.seconds;
  return doc;
}

std::string SummaryTable(const ExperimentSummary& summary) {
  std::ostringstream out;
  out << summary.name << " (" << summary.modality << ", " << summary.trigger
      << " trigger, target class " << summary.target_class << ")\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%8s %9s %9s %7s %7s %7s %9s %9s %9s\n", "rate(%)",
                "acc(%)", "wm_acc(%)", "AD", "TSR", "WDR", "clean_WDR", "WSD_conf",
                "WSD_auto");
  out << line;
  for (const RateSummary& r : summary.rates) {
    std::snprintf(line, sizeof(line), "%8s %9s %9s %7s %7s %7s %9s %9s %9s\n",
                  Percent(r.injection_rate).c_str(), Percent(r.MeanBenignAccuracy()).c_str(),
                  Percent(r.MeanWatermarkedAccuracy()).c_str(),
                  Percent(r.MeanAccuracyDrop()).c_str(),
                  Percent(r.MeanTriggerSuccessRate()).c_str(),
                  Percent(r.WatermarkDetectionRate()).c_str(),
                  Percent(r.BenignDetectionRate()).c_str(),
                  Percent(r.MeanWsdConfidence()).c_str(),
                  Percent(r.MeanWsdReconstruction()).c_str());
    out << line;
  }
  out << "all values in percent\n";
  return out.str();
}

}  // namespace cleanmark
