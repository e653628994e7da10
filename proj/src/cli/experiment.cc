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

#include "cleanmark/experiment.h"

#include <chrono>
#include <cstdio>

#include "cleanmark/blob_io.h"
#include "cleanmark/hash.h"
#include "cleanmark/json_util.h"
#include "cleanmark/rng.h"
#include "cleanmark/synthetic.h"
#include "cleanmark/trigger.h"

namespace cleanmark {
namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string RateLabel(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "rate_%g", 100.0 * rate);
  return buf;
}

void Log(const ExperimentOptions& options, const std::string& line) {
  if (options.log != nullptr) *options.log << line << std::endl;
}

void WriteJson(const std::filesystem::path& path, const nlohmann::json& doc,
               const std::string& config_hash, uint64_t seed) {
  WriteFileText(path, doc.dump(2) + "\n");
  WriteProvenance(path, config_hash, seed);
}

}  // namespace

uint64_t RepetitionSeed(const RunConfig& cfg, size_t repetition) {
  return DeriveSeed(cfg.seed, static_cast<uint64_t>(repetition));
}

uint64_t InitSeed(uint64_t repetition_seed, std::string_view role) {
  return DeriveSeed(repetition_seed, role);
}

PreparedData PrepareData(const RunConfig& cfg, uint64_t repetition_seed) {
  Dataset full = cfg.dataset.generator
                     ? GenerateSynthetic(*cfg.dataset.generator, DeriveSeed(repetition_seed, "data"))
                     : LoadDataset(*cfg.dataset.manifest);
  auto [train, test] =
      Split(full, cfg.dataset.train_fraction, DeriveSeed(repetition_seed, "split"));
  return {std::move(train), std::move(test)};
}

TrainConfig RepetitionTraining(const RunConfig& cfg, uint64_t repetition_seed) {
  TrainConfig train = cfg.train;
  train.seed = DeriveSeed(repetition_seed, "train");
  return train;
}

std::string ConfigHash(const RunConfig& cfg) { return Sha256Hex(cfg.source.dump()); }

void WriteProvenance(const std::filesystem::path& artifact, const std::string& config_hash,
                     uint64_t seed) {
  const nlohmann::json doc = {
      {"artifact", artifact.filename().string()},
      {"sha256", Sha256HexOfFile(artifact)},
      {"config_sha256", config_hash},
      {"seed", seed},
      {"tool_version", kToolVersion},
  };
  std::filesystem::path prov = artifact;
  prov += ".prov.json";
  WriteFileText(prov, doc.dump(2) + "\n");
}

ExperimentSummary RunExperiment(const RunConfig& cfg, const ExperimentOptions& options) {
  const auto start = Clock::now();
  const std::string config_hash = ConfigHash(cfg);
  ExperimentSummary summary;
  summary.name = cfg.name;
  summary.trigger = cfg.watermark.trigger.kind;
  summary.target_class = cfg.watermark.target_class;
  summary.config = cfg.source;
  for (double rate : cfg.watermark.rates) summary.rates.push_back(RateSummary{rate, {}});

  for (size_t rep = 0; rep < cfg.repetitions; ++rep) {
    const uint64_t seed = RepetitionSeed(cfg, rep);
    const PreparedData data = PrepareData(cfg, seed);
    summary.modality = std::string(ModalityName(data.train.modality()));
    if (cfg.watermark.target_class >= data.train.num_classes()) {
      throw ConfigError("watermark.target_class", "outside the dataset's classes");
    }
    const ArchSpec base_arch = ResolveArch(cfg.base_model, data.train);
    const ArchSpec target_arch = ResolveArch(cfg.target_model, data.train);
    const TrainConfig train_cfg = RepetitionTraining(cfg, seed);

    const Model base = Train(InitModel(base_arch, InitSeed(seed, "base")), data.train,
                             train_cfg, nullptr, options.exec);
    const Model benign = target_arch == base_arch
                             ? base
                             : Train(InitModel(target_arch, InitSeed(seed, "target")),
                                     data.train, train_cfg, nullptr, options.exec);
    const double benign_acc = Accuracy(benign, data.test, options.exec);
    const TriggerSpec trigger = ResolveTrigger(cfg.watermark.trigger, data.train, seed);
    const PerturbationBudget budget = ResolveBudget(cfg.watermark.budget, cfg, data.train);
    const ProbeTable benign_probes =
        BuildProbeTable(benign, data.test, trigger, cfg.watermark.target_class, options.exec);
    const auto benign_reports = RunVerificationTrials(benign_probes, cfg.verify, cfg.trials,
                                                      DeriveSeed(seed, "verify-benign"));
    Log(options, "repetition " + std::to_string(rep) + ": benign accuracy " +
                     std::to_string(benign_acc));

    for (size_t ri = 0; ri < cfg.watermark.rates.size(); ++ri) {
      const auto sub_start = Clock::now();
      const double rate = cfg.watermark.rates[ri];
      const WatermarkKey draft = MakeWatermarkKey(data.train, cfg.watermark.target_class, rate,
                                                  trigger, budget, DeriveSeed(seed, "watermark"));
      const WatermarkResult wm = BuildWatermarkedDataset(data.train, draft, base, options.exec);
      const Model suspect =
          Train(InitModel(target_arch, InitSeed(seed, target_arch == base_arch ? "base" : "target")),
                wm.dataset, train_cfg, nullptr, options.exec);

      RepetitionResult r;
      r.seed = seed;
      r.benign_accuracy = benign_acc;
      r.watermarked_accuracy = Accuracy(suspect, data.test, options.exec);
      r.accuracy_drop = AccuracyDrop(r.benign_accuracy, r.watermarked_accuracy);
      const ProbeTable probes =
          BuildProbeTable(suspect, data.test, trigger, cfg.watermark.target_class, options.exec);
      r.trigger_success_rate = TriggerSuccessRate(probes);
      const auto reports =
          RunVerificationTrials(probes, cfg.verify, cfg.trials, DeriveSeed(seed, "verify"));
      r.trials = reports.size();
      for (const auto& rep_report : reports) r.detected_trials += rep_report.detected;
      for (const auto& rep_report : benign_reports) r.benign_detected_trials += rep_report.detected;
      r.watermark_count = wm.key.indices.size();
      r.perturbation_flips = wm.key.perturbation_flips;
      if (cfg.audit.confidence) {
        r.wsd_confidence = WatermarkSampleDetectability(
            ConfidenceOutliers(suspect, wm.dataset, cfg.audit.flag_fraction, options.exec),
            wm.key.indices);
      }
      if (cfg.audit.reconstruction && IsContinuous(wm.dataset.modality())) {
        r.wsd_reconstruction = WatermarkSampleDetectability(
            ReconstructionOutliers(wm.dataset, cfg.audit.autoencoder, cfg.audit.flag_fraction,
                                   DeriveSeed(seed, "audit"), options.exec),
            wm.key.indices);
      }
      r.seconds = SecondsSince(sub_start);

      if (options.output_dir) {
        const auto dir = *options.output_dir / RateLabel(rate) / ("rep_" + std::to_string(rep));
        std::filesystem::create_directories(dir);
        SaveKey(wm.key, dir / "key.json");
        WriteProvenance(dir / "key.json", config_hash, seed);
        SaveModel(suspect, dir / "suspect.model");
        WriteProvenance(dir / "suspect.model", config_hash, seed);
        nlohmann::json trial_docs = nlohmann::json::array();
        for (const auto& rep_report : reports) trial_docs.push_back(ReportToJson(rep_report));
        WriteJson(dir / "verification.json",
                  {{"trigger_success_rate", r.trigger_success_rate},
                   {"detection_rate", WatermarkDetectionRate(reports)},
                   {"trials", std::move(trial_docs)}},
                  config_hash, seed);
      }
      Log(options, "repetition " + std::to_string(rep) + " rate " + std::to_string(rate) +
                       ": AD " + std::to_string(r.accuracy_drop) + " TSR " +
                       std::to_string(r.trigger_success_rate) + " detected " +
                       std::to_string(r.detected_trials) + "/" + std::to_string(r.trials));
      if (options.observer) {
        options.observer(RepetitionContext{rep, seed, rate, data.train, data.test, wm.dataset,
                                           wm.key, base, benign, suspect, probes, benign_probes,
                                           r});
      }
      summary.rates[ri].repetitions.push_back(std::move(r));
    }
  }
  summary.seconds = SecondsSince(start);
  if (options.output_dir) {
    std::filesystem::create_directories(*options.output_dir);
    WriteJson(*options.output_dir / "summary.json", SummaryToJson(summary), config_hash,
              cfg.seed);
    WriteFileText(*options.output_dir / "summary.txt", SummaryTable(summary));
    WriteProvenance(*options.output_dir / "summary.txt", config_hash, cfg.seed);
  }
  return summary;
}

}  // namespace cleanmark
