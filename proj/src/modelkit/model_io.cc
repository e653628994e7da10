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

#include <cstring>
#include <fstream>

#include "cleanmark/blob_io.h"
#include "cleanmark/errors.h"
#include "cleanmark/model.h"
#include "cleanmark/serialization.h"

namespace cleanmark {
namespace {

using nlohmann::json;

constexpr char kParamMagic[4] = {'C', 'M', 'P', '1'};
constexpr int kModelFormatVersion = 1;

}  // namespace

json ArchToJson(const ArchSpec& arch) {
  json doc;
  doc["family"] = std::string(FamilyName(arch.family));
  doc["input_shape"] = arch.input_shape;
  doc["num_classes"] = arch.num_classes;
  doc["hidden"] = arch.hidden;
  doc["channels1"] = arch.channels1;
  doc["channels2"] = arch.channels2;
  doc["kernel"] = arch.kernel;
  doc["stride"] = arch.stride;
  doc["embed_dim"] = arch.embed_dim;
  return doc;
}

ArchSpec ArchFromJson(const json& doc, const std::string& path) {
  JsonReader r(doc, path);
  ArchSpec arch;
  const auto family = r.Required<std::string>("family");
  try {
    arch.family = ParseFamily(family);
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(r.Child("family"), e.what());
  }
  arch.input_shape = r.Optional<std::vector<size_t>>("input_shape", {});
  arch.num_classes = r.Optional<uint32_t>("num_classes", 0);
  arch.hidden = r.Optional<size_t>("hidden", arch.hidden);
  arch.channels1 = r.Optional<size_t>("channels1", arch.channels1);
  arch.channels2 = r.Optional<size_t>("channels2", arch.channels2);
  arch.kernel = r.Optional<size_t>("kernel", arch.kernel);
  arch.stride = r.Optional<size_t>("stride", arch.stride);
  arch.embed_dim = r.Optional<size_t>("embed_dim", arch.embed_dim);
  r.RejectUnknown();
  return arch;
}

json TrainConfigToJson(const TrainConfig& cfg) {
  json doc;
  doc["epochs"] = cfg.epochs;
  doc["batch_size"] = cfg.batch_size;
  doc["learning_rate"] = cfg.schedule.initial_rate;
  doc["decay_epoch"] = cfg.schedule.decay_epoch;
  doc["decayed_rate"] = cfg.schedule.decayed_rate;
  doc["momentum"] = cfg.momentum;
  doc["seed"] = cfg.seed;
  return doc;
}

TrainConfig TrainConfigFromJson(const json& doc, const std::string& path) {
  JsonReader r(doc, path);
  TrainConfig cfg;
  cfg.epochs = r.Optional<size_t>("epochs", cfg.epochs);
  cfg.batch_size = r.Optional<size_t>("batch_size", cfg.batch_size);
  cfg.schedule.initial_rate = r.Optional<double>("learning_rate", cfg.schedule.initial_rate);
  cfg.schedule.decay_epoch = r.Optional<size_t>("decay_epoch", cfg.schedule.decay_epoch);
  cfg.schedule.decayed_rate = r.Optional<double>("decayed_rate", cfg.schedule.decayed_rate);
  cfg.momentum = r.Optional<double>("momentum", cfg.momentum);
  cfg.seed = r.Optional<uint64_t>("seed", cfg.seed);
  r.RejectUnknown();
  try {
    ValidateTrainConfig(cfg);
  } catch (const InvalidArgumentError& e) {
    throw ConfigError(path, e.what());
  }
  return cfg;
}

void SaveModel(const Model& model, const std::filesystem::path& path) {
  json header;
  header["format"] = "cleanmark-model";
  header["version"] = kModelFormatVersion;
  header["arch"] = ArchToJson(model.arch());
  header["lineage"] = model.lineage();
  header["param_count"] = model.param_count();
  std::vector<uint8_t> bytes;
  const std::string text = header.dump() + "\n";
  bytes.assign(text.begin(), text.end());
  bytes.insert(bytes.end(), kParamMagic, kParamMagic + 4);
  AppendU64(bytes, model.param_count());
  for (double p : model.params()) AppendF32(bytes, static_cast<float>(p));
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  WriteFileBytes(path, bytes);
}

Model LoadModel(const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = ReadFileBytes(path);
  const auto newline = std::find(bytes.begin(), bytes.end(), static_cast<uint8_t>('\n'));
  if (newline == bytes.end()) throw FormatError(path.string() + ": missing model header");
  json header;
  try {
    header = json::parse(bytes.begin(), newline);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (header.value("format", "") != "cleanmark-model" ||
      header.value("version", 0) != kModelFormatVersion) {
    throw FormatError(path.string() + ": not a version-1 cleanmark model file");
  }
  ArchSpec arch = ArchFromJson(header.at("arch"), "arch");
  auto lineage = header.value("lineage", std::vector<std::string>{});
  ByteReader reader(std::span<const uint8_t>(bytes).subspan(
      static_cast<size_t>(newline - bytes.begin()) + 1));
  auto magic = reader.Take(4);
  if (std::memcmp(magic.data(), kParamMagic, 4) != 0) {
    throw FormatError(path.string() + ": bad parameter magic (expected CMP1)");
  }
  const uint64_t count = reader.U64();
  if (count > reader.remaining() / 4) {
    throw FormatError(path.string() + ": parameter blob truncated");
  }
  std::vector<double> params(count);
  for (auto& p : params) p = reader.F32();
  try {
    return Model(std::move(arch), std::move(params), std::move(lineage));
  } catch (const InvalidArgumentError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace cleanmark
