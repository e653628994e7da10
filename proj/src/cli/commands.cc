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

#include <CLI11.hpp>

#include <filesystem>
#include <optional>

#include "cleanmark/audit.h"
#include "cleanmark/blob_io.h"
#include "cleanmark/cli.h"
#include "cleanmark/config.h"
#include "cleanmark/errors.h"
#include "cleanmark/experiment.h"
#include "cleanmark/json_util.h"
#include "cleanmark/rng.h"
#include "cleanmark/verify.h"
#include "cleanmark/watermark.h"

namespace cleanmark {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::optional<uint64_t> seed;
  std::string out;
  std::string data = "clean";
  std::string model;
  std::string key;
  bool strict_exit = false;
};

// Layout of the step-by-step commands under the output directory.
struct Layout {
  fs::path root;
  fs::path train() const { return root / "data" / "train.json"; }
  fs::path test() const { return root / "data" / "test.json"; }
  fs::path watermarked() const { return root / "data" / "watermarked.json"; }
  fs::path key() const { return root / "key.json"; }
  fs::path base_model() const { return root / "models" / "base.model"; }
  fs::path benign_model() const { return root / "models" / "benign.model"; }
  fs::path suspect_model() const { return root / "models" / "suspect.model"; }
  fs::path reports() const { return root / "reports"; }
};

class Runner {
 public:
  Runner(const Options& opts, std::ostream& out, std::ostream& err)
      : opts_(opts), out_(out), err_(err) {
    cfg_ = ParseConfig(opts.config);
    if (opts.seed) {
      cfg_.seed = *opts.seed;
      cfg_.source["seed"] = *opts.seed;
    }
    layout_.root = opts.out.empty() ? OutputDirectory(cfg_) : fs::path(opts.out);
    hash_ = ConfigHash(cfg_);
    seed_ = RepetitionSeed(cfg_, 0);
  }

  int Gen() {
    const PreparedData data = PrepareData(cfg_, seed_);
    Save(data.train, layout_.train(), "train");
    Save(data.test, layout_.test(), "test");
    out_ << "wrote " << data.train.size() << " training and " << data.test.size()
         << " test samples under " << (layout_.root / "data").string() << "\n";
    return kExitOk;
  }

  int Train() {
    const Dataset train = LoadDataset(opts_.data == "clean" ? layout_.train() : layout_.watermarked());
    const TrainConfig tc = RepetitionTraining(cfg_, seed_);
    const ArchSpec base_arch = ResolveArch(cfg_.base_model, train);
    const ArchSpec target_arch = ResolveArch(cfg_.target_model, train);
    const bool same = base_arch == target_arch;
    if (opts_.data == "clean") {
      const Model base = cleanmark::Train(InitModel(base_arch, InitSeed(seed_, "base")), train, tc);
      SaveArtifactModel(base, layout_.base_model());
      const Model benign = same ? base
                                : cleanmark::Train(InitModel(target_arch, InitSeed(seed_, "target")),
                                                   train, tc);
      SaveArtifactModel(benign, layout_.benign_model());
      out_ << "wrote " << layout_.base_model().string() << " and "
           << layout_.benign_model().string() << "\n";
    } else {
      const Model suspect = cleanmark::Train(
          InitModel(target_arch, InitSeed(seed_, same ? "base" : "target")), train, tc);
      SaveArtifactModel(suspect, layout_.suspect_model());
      out_ << "wrote " << layout_.suspect_model().string() << "\n";
    }
    return kExitOk;
  }

  int Watermark() {
    const Dataset train = LoadDataset(layout_.train());
    const Model base = LoadModel(layout_.base_model());
    const TriggerSpec trigger = ResolveTrigger(cfg_.watermark.trigger, train, seed_);
    const PerturbationBudget budget = ResolveBudget(cfg_.watermark.budget, cfg_, train);
    if (cfg_.watermark.rates.size() > 1) {
      err_ << "note: watermark uses the first configured rate; experiment sweeps all\n";
    }
    const WatermarkKey draft =
        MakeWatermarkKey(train, cfg_.watermark.target_class, cfg_.watermark.rates.front(),
                         trigger, budget, DeriveSeed(seed_, "watermark"));
    const WatermarkResult wm = BuildWatermarkedDataset(train, draft, base);
    Save(wm.dataset, layout_.watermarked(), "watermarked");
    SaveKey(wm.key, layout_.key());
    WriteProvenance(layout_.key(), hash_, seed_);
    out_ << "watermarked " << wm.key.indices.size() << " samples of class "
         << wm.key.target_class << "; key written to " << layout_.key().string()
         << " (keep it private: it is the verification secret)\n";
    return kExitOk;
  }

  int Eval() {
    const Model model = LoadModel(RequireModel());
    const Dataset test = LoadDataset(layout_.test());
    const nlohmann::json doc = {{"model", opts_.model},
                                {"fingerprint", Fingerprint(model)},
                                {"test_accuracy", Accuracy(model, test)}};
    out_ << doc.dump(2) << "\n";
    return kExitOk;
  }

  int Verify() {
    const Model model = LoadModel(RequireModel());
    const WatermarkKey key = LoadKey(opts_.key.empty() ? layout_.key() : fs::path(opts_.key));
    const Dataset test = LoadDataset(layout_.test());
    const VerificationReport report =
        DetectWatermark(model, key, test, cfg_.verify, DeriveSeed(cfg_.seed, "verify"));
    nlohmann::json doc = ReportToJson(report);
    doc["model"] = opts_.model;
    doc["model_fingerprint"] = Fingerprint(model);
    WriteReport("verify", doc);
    out_ << doc.dump(2) << "\n";
    return opts_.strict_exit && report.detected ? kExitDetected : kExitOk;
  }

  int Audit() {
    const Model model = LoadModel(RequireModel());
    const WatermarkKey key = LoadKey(opts_.key.empty() ? layout_.key() : fs::path(opts_.key));
    const Dataset data = LoadDataset(layout_.watermarked());
    nlohmann::json doc = {{"model", opts_.model}, {"flag_fraction", cfg_.audit.flag_fraction}};
    if (cfg_.audit.confidence) {
      const auto flagged = ConfidenceOutliers(model, data, cfg_.audit.flag_fraction);
      doc["confidence"] = nlohmann::json::object(
          {{"flagged", flagged.size()},
           {"wsd", WatermarkSampleDetectability(flagged, key.indices)}});
    }
    if (cfg_.audit.reconstruction && IsContinuous(data.modality())) {
      const auto flagged = ReconstructionOutliers(data, cfg_.audit.autoencoder,
                                                  cfg_.audit.flag_fraction,
                                                  DeriveSeed(cfg_.seed, "audit"));
      doc["reconstruction"] = nlohmann::json::object(
          {{"flagged", flagged.size()},
           {"wsd", WatermarkSampleDetectability(flagged, key.indices)}});
    }
    WriteReport("audit", doc);
    out_ << doc.dump(2) << "\n";
    return kExitOk;
  }

  int Experiment() {
    ExperimentOptions eo;
    eo.output_dir = layout_.root;
    eo.log = &err_;
    const ExperimentSummary summary = RunExperiment(cfg_, eo);
    out_ << SummaryTable(summary);
    return kExitOk;
  }

 private:
  fs::path RequireModel() const {
    if (opts_.model.empty()) throw ConfigError("--model", "a model path is required");
    return opts_.model;
  }

  void Save(const Dataset& dataset, const fs::path& manifest, const std::string& name) {
    SaveDataset(dataset, manifest, name);
    WriteProvenance(manifest, hash_, seed_);
  }

  void SaveArtifactModel(const Model& model, const fs::path& path) {
    fs::create_directories(path.parent_path());
    SaveModel(model, path);
    WriteProvenance(path, hash_, seed_);
  }

  void WriteReport(const std::string& kind, const nlohmann::json& doc) {
    fs::create_directories(layout_.reports());
    const fs::path path =
        layout_.reports() / (kind + "-" + fs::path(opts_.model).stem().string() + ".json");
    WriteFileText(path, doc.dump(2) + "\n");
    WriteProvenance(path, hash_, cfg_.seed);
  }

  const Options& opts_;
  std::ostream& out_;
  std::ostream& err_;
  RunConfig cfg_;
  Layout layout_;
  std::string hash_;
  uint64_t seed_ = 0;
};

}  // namespace

int RunCommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cleanmark: clean-label dataset watermarking and ownership verification"};
  app.require_subcommand(1);
  Options opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Run configuration (JSON)")->required();
    sub->add_option("--seed", opts.seed, "Override the config seed");
    sub->add_option("--out", opts.out, "Output directory (default from config or $CLEANMARK_OUT)");
  };
  auto* gen = app.add_subcommand("gen", "Generate or load the corpus and split it");
  auto* train = app.add_subcommand("train", "Train a model on clean or watermarked data");
  train->add_option("--data", opts.data, "clean | watermarked")
      ->check(CLI::IsMember({"clean", "watermarked"}));
  auto* watermark = app.add_subcommand("watermark", "Build the watermarked dataset and key");
  auto* eval = app.add_subcommand("eval", "Report test accuracy of a model");
  eval->add_option("--model", opts.model, "Model file")->required();
  auto* verify = app.add_subcommand("verify", "Test a suspect model for the watermark");
  verify->add_option("--model", opts.model, "Suspect model file")->required();
  verify->add_option("--key", opts.key, "Watermark key (default <out>/key.json)");
  verify->add_flag("--strict-exit", opts.strict_exit, "Exit 10 when the watermark is detected");
  auto* audit = app.add_subcommand("audit", "Run the stealthiness audits");
  audit->add_option("--model", opts.model, "Model trained on the watermarked data")->required();
  audit->add_option("--key", opts.key, "Watermark key (default <out>/key.json)");
  auto* experiment = app.add_subcommand("experiment", "Run the whole pipeline");
  for (auto* sub : {gen, train, watermark, eval, verify, audit, experiment}) add_common(sub);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  }

  try {
    Runner runner(opts, out, err);
    if (*gen) return runner.Gen();
    if (*train) return runner.Train();
    if (*watermark) return runner.Watermark();
    if (*eval) return runner.Eval();
    if (*verify) return runner.Verify();
    if (*audit) return runner.Audit();
    return runner.Experiment();
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntimeFailure;
  }
}

}  // namespace cleanmark
