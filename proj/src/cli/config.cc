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

#include "cleanmark/config.h"

#include <cstdlib>

#include "cleanmark/blob_io.h"
#include "cleanmark/json_util.h"
#include "cleanmark/rng.h"
#include "cleanmark/serialization.h"

namespace cleanmark {
namespace {

using nlohmann::json;

void Require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, message);
}

bool InUnit(double v) { return v >= 0.0 && v <= 1.0; }

GeneratorSpec ParseGenerator(JsonReader& r) {
  GeneratorSpec spec;
  try {
    spec.modality = ParseModality(r.Required<std::string>("modality"));
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(r.Child("modality"), e.what());
  }
  switch (spec.modality) {
    case Modality::kImage: {
      auto& s = spec.image;
      s.num_classes = r.Required<uint32_t>("num_classes");
      s.num_samples = r.Optional<size_t>("num_samples", s.num_samples);
      s.height = r.Optional<size_t>("height", s.height);
      s.width = r.Optional<size_t>("width", s.width);
      s.channels = r.Optional<size_t>("channels", s.channels);
      s.contrast_min = r.Optional<double>("contrast_min", s.contrast_min);
      s.contrast_max = r.Optional<double>("contrast_max", s.contrast_max);
      s.noise = r.Optional<double>("noise", s.noise);
      break;
    }
    case Modality::kAudio: {
      auto& s = spec.audio;
      s.num_classes = r.Required<uint32_t>("num_classes");
      s.num_samples = r.Optional<size_t>("num_samples", s.num_samples);
      s.length = r.Optional<size_t>("length", s.length);
      s.amplitude_min = r.Optional<double>("amplitude_min", s.amplitude_min);
      s.amplitude_max = r.Optional<double>("amplitude_max", s.amplitude_max);
      s.noise = r.Optional<double>("noise", s.noise);
      break;
    }
    case Modality::kText: {
      auto& s = spec.text;
      s.num_classes = r.Required<uint32_t>("num_classes");
      s.num_samples = r.Optional<size_t>("num_samples", s.num_samples);
      s.vocab_size = r.Optional<uint32_t>("vocab_size", s.vocab_size);
      s.words_per_class = r.Optional<uint32_t>("words_per_class", s.words_per_class);
      s.reserved_words = r.Optional<uint32_t>("reserved_words", s.reserved_words);
      s.min_length = r.Optional<size_t>("min_length", s.min_length);
      s.max_length = r.Optional<size_t>("max_length", s.max_length);
      s.signal_rate = r.Optional<double>("signal_rate", s.signal_rate);
      s.cross_rate = r.Optional<double>("cross_rate", s.cross_rate);
      break;
    }
  }
  r.RejectUnknown();
  return spec;
}

WordRef ParseWord(const json& value, const std::string& path) {
  WordRef w;
  if (value.is_string()) {
    w.name = value.get<std::string>();
  } else if (value.is_number_unsigned() ||
             (value.is_number_integer() && value.get<int64_t>() >= 0)) {
    w.id = value.get<uint32_t>();
  } else {
    throw ConfigError(path, "expected a word or a non-negative token id");
  }
  return w;
}

WordPosition ParseWordPosition(const std::string& s, const std::string& path) {
  if (s == "initial") return WordPosition::kInitial;
  if (s == "middle") return WordPosition::kMiddle;
  if (s == "end") return WordPosition::kEnd;
  throw ConfigError(path, "position must be initial, middle or end");
}

TriggerChoice ParseTrigger(JsonReader& r) {
  TriggerChoice t;
  t.kind = r.Required<std::string>("kind");
  if (t.kind == "patch") {
    t.patch_size = r.Optional<size_t>("size", t.patch_size);
    if (r.Has("row")) t.row = r.Required<size_t>("row");
    if (r.Has("col")) t.col = r.Required<size_t>("col");
    t.transparency = r.Optional<double>("transparency", t.transparency);
    Require(t.patch_size > 0, r.Child("size"), "must be positive");
    Require(InUnit(t.transparency), r.Child("transparency"), "must lie in [0, 1]");
  } else if (t.kind == "blend") {
    t.tile = r.Optional<size_t>("tile", t.tile);
    t.blend_ratio = r.Optional<double>("blend_ratio", t.blend_ratio);
    Require(t.tile > 0, r.Child("tile"), "must be positive");
    Require(InUnit(t.blend_ratio), r.Child("blend_ratio"), "must lie in [0, 1]");
  } else if (t.kind == "impulse") {
    t.impulse.amplitude = r.Optional<double>("amplitude", t.impulse.amplitude);
    t.impulse.position = r.Optional<size_t>("position", t.impulse.position);
    t.impulse.length_fraction = r.Optional<double>("length_fraction", t.impulse.length_fraction);
    Require(t.impulse.amplitude >= -1.0 && t.impulse.amplitude <= 1.0, r.Child("amplitude"),
            "must lie in [-1, 1]");
    Require(t.impulse.length_fraction > 0.0 && t.impulse.length_fraction <= 1.0,
            r.Child("length_fraction"), "must lie in (0, 1]");
  } else if (t.kind == "word") {
    t.word = ParseWord(r.Raw("word"), r.Child("word"));
    t.position = ParseWordPosition(r.Optional<std::string>("position", "end"),
                                   r.Child("position"));
  } else if (t.kind == "style") {
    t.will = ParseWord(r.Raw("will"), r.Child("will"));
    t.have = ParseWord(r.Raw("have"), r.Child("have"));
    t.been = ParseWord(r.Raw("been"), r.Child("been"));
    const json& list = r.Raw("participles");
    const std::string path = r.Child("participles");
    Require(list.is_array() && !list.empty(), path, "expected a non-empty list of pairs");
    for (size_t i = 0; i < list.size(); ++i) {
      const std::string at = path + "[" + std::to_string(i) + "]";
      Require(list[i].is_array() && list[i].size() == 2, at, "expected [verb, participle]");
      t.participles.emplace_back(ParseWord(list[i][0], at), ParseWord(list[i][1], at));
    }
  } else {
    throw ConfigError(r.Child("kind"), "unknown trigger kind '" + t.kind + "'");
  }
  r.RejectUnknown();
  return t;
}

BudgetChoice ParseBudget(JsonReader& r, const std::filesystem::path& base_dir) {
  BudgetChoice b;
  if (r.Has("epsilon")) b.epsilon = r.Required<double>("epsilon");
  if (r.Has("step_length")) b.step_length = r.Required<double>("step_length");
  if (r.Has("iterations")) b.iterations = r.Required<size_t>("iterations");
  b.max_actions = r.Optional<size_t>("max_actions", b.max_actions);
  b.similarity_threshold = r.Optional<double>("similarity_threshold", b.similarity_threshold);
  if (r.Has("synonyms")) b.synonyms_path = base_dir / r.Required<std::string>("synonyms");
  if (r.Has("insertable")) {
    const json& list = r.Raw("insertable");
    Require(list.is_array(), r.Child("insertable"), "expected a list of words");
    for (const json& w : list) b.insertable.push_back(ParseWord(w, r.Child("insertable")));
  }
  r.RejectUnknown();
  Require(!b.epsilon || *b.epsilon > 0.0, r.Child("epsilon"), "must be positive");
  Require(!b.step_length || *b.step_length > 0.0, r.Child("step_length"), "must be positive");
  Require(InUnit(b.similarity_threshold), r.Child("similarity_threshold"),
          "must lie in [0, 1]");
  return b;
}

ModelChoice ParseModel(JsonReader& r) {
  ModelChoice m;
  if (r.Has("family")) {
    try {
      m.family = ParseFamily(r.Required<std::string>("family"));
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidArgumentError& e) {
      throw ConfigError(r.Child("family"), e.what());
    }
    Require(*m.family != Family::kDenseAutoencoder, r.Child("family"),
            "the autoencoder is not a classifier");
  }
  m.hidden = r.Optional<size_t>("hidden", m.hidden);
  m.channels1 = r.Optional<size_t>("channels1", m.channels1);
  m.channels2 = r.Optional<size_t>("channels2", m.channels2);
  m.kernel = r.Optional<size_t>("kernel", m.kernel);
  m.stride = r.Optional<size_t>("stride", m.stride);
  m.embed_dim = r.Optional<size_t>("embed_dim", m.embed_dim);
  r.RejectUnknown();
  return m;
}

uint32_t LookupWord(const WordRef& w, const Dataset& dataset) {
  if (!w.name) {
    if (w.id >= dataset.vocab_size()) {
      throw ConfigError("watermark", "token id " + std::to_string(w.id) + " outside vocabulary");
    }
    return w.id;
  }
  const auto& vocab = dataset.vocabulary();
  for (uint32_t i = 0; i < vocab.size(); ++i) {
    if (vocab[i] == *w.name) return i;
  }
  throw ConfigError("watermark", "word '" + *w.name + "' is not in the vocabulary");
}

}  // namespace

GeneratorSpec GeneratorFromJson(const json& doc, const std::string& path) {
  JsonReader r(doc, path);
  return ParseGenerator(r);
}

RunConfig ConfigFromJson(const json& doc, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.source = doc;
  JsonReader root(doc, "");
  cfg.name = root.Required<std::string>("name");
  Require(!cfg.name.empty(), "name", "must not be empty");
  if (root.Has("output_dir")) cfg.output_dir = root.Required<std::string>("output_dir");
  cfg.seed = root.Optional<uint64_t>("seed", cfg.seed);
  cfg.repetitions = root.Optional<size_t>("repetitions", cfg.repetitions);
  Require(cfg.repetitions > 0, "repetitions", "must be at least 1");

  {
    JsonReader d = root.Object("dataset");
    if (d.Has("generator")) {
      JsonReader g = d.Object("generator");
      cfg.dataset.generator = ParseGenerator(g);
    }
    if (d.Has("manifest")) cfg.dataset.manifest = base_dir / d.Required<std::string>("manifest");
    Require(cfg.dataset.generator.has_value() != cfg.dataset.manifest.has_value(), "dataset",
            "set exactly one of generator or manifest");
    cfg.dataset.train_fraction = d.Optional<double>("train_fraction", cfg.dataset.train_fraction);
    Require(cfg.dataset.train_fraction > 0.0 && cfg.dataset.train_fraction < 1.0,
            "dataset.train_fraction", "must lie in (0, 1)");
    d.RejectUnknown();
  }

  if (root.Has("models")) {
    JsonReader m = root.Object("models");
    if (m.Has("base")) {
      JsonReader b = m.Object("base");
      cfg.base_model = ParseModel(b);
    }
    cfg.target_model = cfg.base_model;
    if (m.Has("target")) {
      JsonReader t = m.Object("target");
      cfg.target_model = ParseModel(t);
    }
    m.RejectUnknown();
  }

  if (root.Has("train")) cfg.train = TrainConfigFromJson(root.Raw("train"), "train");

  {
    JsonReader w = root.Object("watermark");
    cfg.watermark.target_class = w.Optional<uint32_t>("target_class", 0);
    if (w.Has("rates")) {
      cfg.watermark.rates = w.Required<std::vector<double>>("rates");
    } else if (w.Has("rate")) {
      cfg.watermark.rates = {w.Required<double>("rate")};
    }
    Require(!cfg.watermark.rates.empty(), "watermark.rates", "must not be empty");
    for (double r : cfg.watermark.rates) {
      Require(r > 0.0 && r <= 1.0, "watermark.rates", "each rate must lie in (0, 1]");
    }
    JsonReader t = w.Object("trigger");
    cfg.watermark.trigger = ParseTrigger(t);
    if (w.Has("budget")) {
      JsonReader b = w.Object("budget");
      cfg.watermark.budget = ParseBudget(b, base_dir);
    }
    w.RejectUnknown();
  }

  if (root.Has("verify")) {
    JsonReader v = root.Object("verify");
    cfg.verify.num_probes = v.Optional<size_t>("num_probes", cfg.verify.num_probes);
    cfg.verify.certainty = v.Optional<double>("certainty", cfg.verify.certainty);
    cfg.verify.significance = v.Optional<double>("significance", cfg.verify.significance);
    cfg.trials = v.Optional<size_t>("trials", cfg.trials);
    v.RejectUnknown();
    Require(cfg.verify.num_probes > 0, "verify.num_probes", "must be at least 1");
    Require(InUnit(cfg.verify.certainty), "verify.certainty", "must lie in [0, 1]");
    Require(cfg.verify.significance > 0.0 && cfg.verify.significance < 1.0,
            "verify.significance", "must lie in (0, 1)");
    Require(cfg.trials > 0, "verify.trials", "must be at least 1");
  }

  if (root.Has("audit")) {
    JsonReader a = root.Object("audit");
    cfg.audit.flag_fraction = a.Optional<double>("flag_fraction", cfg.audit.flag_fraction);
    cfg.audit.confidence = a.Optional<bool>("confidence", cfg.audit.confidence);
    cfg.audit.reconstruction = a.Optional<bool>("reconstruction", cfg.audit.reconstruction);
    if (a.Has("autoencoder")) {
      JsonReader ae = a.Object("autoencoder");
      cfg.audit.autoencoder.hidden = ae.Optional<size_t>("hidden", cfg.audit.autoencoder.hidden);
      Require(cfg.audit.autoencoder.hidden > 0, "audit.autoencoder.hidden", "must be positive");
      if (ae.Has("train")) {
        cfg.audit.autoencoder.train =
            TrainConfigFromJson(ae.Raw("train"), "audit.autoencoder.train");
      }
      ae.RejectUnknown();
    }
    a.RejectUnknown();
    Require(InUnit(cfg.audit.flag_fraction), "audit.flag_fraction", "must lie in [0, 1]");
  }
  root.RejectUnknown();

  if (cfg.dataset.generator) {
    const GeneratorSpec& g = *cfg.dataset.generator;
    const uint32_t k = g.modality == Modality::kImage   ? g.image.num_classes
                       : g.modality == Modality::kAudio ? g.audio.num_classes
                                                        : g.text.num_classes;
    Require(cfg.watermark.target_class < k, "watermark.target_class",
            "must be below the class count " + std::to_string(k));
    Require(IsContinuous(g.modality) ==
                (cfg.watermark.trigger.kind != "word" && cfg.watermark.trigger.kind != "style"),
            "watermark.trigger.kind", "does not fit the dataset modality");
  }
  return cfg;
}

RunConfig ParseConfig(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(ReadFileText(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("malformed JSON: ") + e.what());
  } catch (const IoError& e) {
    throw ConfigError(path.string(), e.what());
  }
  return ConfigFromJson(doc, path.parent_path());
}

std::filesystem::path OutputDirectory(const RunConfig& cfg) {
  if (cfg.output_dir) {
    return cfg.output_dir->is_absolute() ? *cfg.output_dir : cfg.base_dir / *cfg.output_dir;
  }
  if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') {
    return std::filesystem::path(root) / cfg.name;
  }
  return std::filesystem::path("cleanmark-out") / cfg.name;
}

ArchSpec ResolveArch(const ModelChoice& choice, const Dataset& dataset) {
  ArchSpec arch = DefaultArchFor(dataset);
  if (choice.family) arch.family = *choice.family;
  if (arch.family == Family::kBowText) {
    arch.input_shape = {dataset.vocab_size()};
  } else {
    arch.input_shape = dataset.sample_shape();
  }
  arch.hidden = choice.hidden;
  arch.channels1 = choice.channels1;
  arch.channels2 = choice.channels2;
  arch.kernel = choice.kernel;
  arch.stride = choice.stride;
  arch.embed_dim = choice.embed_dim;
  try {
    ValidateArch(arch);
    CheckCompatible(arch, dataset);
  } catch (const InvalidArgumentError& e) {
    throw ConfigError("models", e.what());
  }
  return arch;
}

TriggerSpec ResolveTrigger(const TriggerChoice& choice, const Dataset& dataset, uint64_t seed) {
  TriggerSpec spec;
  const auto& shape = dataset.sample_shape();
  if (choice.kind == "patch") {
    if (dataset.modality() != Modality::kImage) {
      throw ConfigError("watermark.trigger", "patch needs image data");
    }
    PatchTrigger p = DefaultPatch(shape);
    if (choice.patch_size != 3) {
      const size_t s = choice.patch_size, c = shape[2];
      p.shape = {s, s, c};
      p.pattern.assign(s * s * c, 0.0f);
      p.mask.assign(s * s * c, 1.0f);
      for (size_t r = 0; r < s; ++r) {
        for (size_t q = 0; q < s; ++q) {
          for (size_t k = 0; k < c; ++k) p.pattern[(r * s + q) * c + k] = (r + q) % 2 == 0;
        }
      }
      if (s > shape[0] || s > shape[1]) {
        throw ConfigError("watermark.trigger.size", "patch larger than the image");
      }
      p.row = shape[0] - s;
      p.col = shape[1] - s;
    }
    if (choice.row) p.row = *choice.row;
    if (choice.col) p.col = *choice.col;
    p.transparency = choice.transparency;
    spec = p;
  } else if (choice.kind == "blend") {
    if (dataset.modality() != Modality::kImage) {
      throw ConfigError("watermark.trigger", "blend needs image data");
    }
    spec = MosaicBlend(shape, choice.tile, choice.blend_ratio, DeriveSeed(seed, "trigger"));
  } else if (choice.kind == "impulse") {
    spec = choice.impulse;
  } else if (choice.kind == "word") {
    spec = WordTrigger{LookupWord(choice.word, dataset), choice.position};
  } else {
    StyleTrigger s;
    s.will_id = LookupWord(choice.will, dataset);
    s.have_id = LookupWord(choice.have, dataset);
    s.been_id = LookupWord(choice.been, dataset);
    for (const auto& [verb, part] : choice.participles) {
      s.participles[LookupWord(verb, dataset)] = LookupWord(part, dataset);
    }
    spec = s;
  }
  try {
    ValidateTrigger(spec, dataset);
  } catch (const InvalidArgumentError& e) {
    throw ConfigError("watermark.trigger", e.what());
  }
  return spec;
}

PerturbationBudget ResolveBudget(const BudgetChoice& choice, const RunConfig& cfg,
                                 const Dataset& dataset) {
  if (IsContinuous(dataset.modality())) {
    PgdBudget b = DefaultPgdBudget(dataset.modality());
    if (choice.epsilon) b.epsilon = *choice.epsilon;
    if (choice.step_length) b.step_length = *choice.step_length;
    if (choice.iterations) b.iterations = *choice.iterations;
    try {
      ValidatePgdBudget(b);
    } catch (const InvalidArgumentError& e) {
      throw ConfigError("watermark.budget", e.what());
    }
    return b;
  }
  TextBudget b;
  b.max_actions = choice.max_actions;
  b.similarity_threshold = choice.similarity_threshold;
  if (choice.synonyms_path) {
    b.synonyms = LoadSynonymTable(*choice.synonyms_path, dataset.vocabulary());
    for (const WordRef& w : choice.insertable) b.insertable.push_back(LookupWord(w, dataset));
  } else if (cfg.dataset.generator) {
    const SyntheticLexicon lex = MakeSyntheticLexicon(cfg.dataset.generator->text);
    b.synonyms = lex.synonyms;
    b.insertable = lex.insertable;
    if (!choice.insertable.empty()) {
      b.insertable.clear();
      for (const WordRef& w : choice.insertable) b.insertable.push_back(LookupWord(w, dataset));
    }
  } else {
    throw ConfigError("watermark.budget.synonyms", "text data from a manifest needs a synonym table");
  }
  try {
    ValidateTextBudget(b, dataset.vocab_size());
  } catch (const InvalidArgumentError& e) {
    throw ConfigError("watermark.budget", e.what());
  }
  return b;
}

}  // namespace cleanmark
