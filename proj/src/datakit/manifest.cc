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

#include <json.hpp>

#include <sstream>
#include <string>

#include "cleanmark/blob_io.h"
#include "cleanmark/dataset.h"
#include "cleanmark/errors.h"

namespace cleanmark {
namespace {

using nlohmann::json;

template <typename T>
T Field(const json& doc, const char* key, const std::filesystem::path& path) {
  if (!doc.contains(key)) {
    throw FormatError(path.string() + ": manifest is missing field '" + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": field '" + key + "' has the wrong type");
  }
}

std::vector<std::string> ReadVocabulary(const std::filesystem::path& path) {
  std::istringstream in(ReadFileText(path));
  std::vector<std::string> words;
  for (std::string line; std::getline(in, line);) words.push_back(line);
  return words;
}

}  // namespace

Dataset LoadDataset(const std::filesystem::path& manifest_path) {
  json doc;
  try {
    doc = json::parse(ReadFileText(manifest_path));
  } catch (const json::parse_error& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  const auto dir = manifest_path.parent_path();
  const Modality modality =
      ParseModality(Field<std::string>(doc, "modality", manifest_path));
  const auto num_classes = Field<uint32_t>(doc, "num_classes", manifest_path);
  const auto shape = Field<std::vector<size_t>>(doc, "shape", manifest_path);
  const auto samples_path = dir / Field<std::string>(doc, "samples_path", manifest_path);
  const auto labels_path = dir / Field<std::string>(doc, "labels_path", manifest_path);

  TensorBlob labels_blob = DecodeTensor(ReadFileBytes(labels_path));
  if (labels_blob.dtype != DType::kU32 || labels_blob.dims.size() != 1) {
    throw FormatError(labels_path.string() + ": labels must be a rank-1 u32 tensor");
  }
  const size_t n = labels_blob.dims[0];

  try {
    if (modality == Modality::kText) {
      if (shape.size() != 1) {
        throw FormatError(manifest_path.string() +
                          ": text shape must be [vocab_size]");
      }
      auto sequences = DecodeTextBlob(ReadFileBytes(samples_path));
      if (sequences.size() != n) {
        throw FormatError(samples_path.string() + ": holds " +
                          std::to_string(sequences.size()) + " samples but labels hold " +
                          std::to_string(n));
      }
      std::vector<std::string> vocabulary;
      if (doc.contains("vocab_path") && !doc["vocab_path"].is_null()) {
        vocabulary = ReadVocabulary(dir / doc["vocab_path"].get<std::string>());
      }
      return Dataset::Text(num_classes, static_cast<uint32_t>(shape[0]),
                           std::move(sequences), std::move(labels_blob.u32),
                           std::move(vocabulary));
    }
    TensorBlob samples_blob = DecodeTensor(ReadFileBytes(samples_path));
    if (samples_blob.dtype != DType::kF32) {
      throw FormatError(samples_path.string() + ": samples must be f32");
    }
    if (samples_blob.dims.size() != shape.size() + 1 || samples_blob.dims[0] != n) {
      throw FormatError(samples_path.string() +
                        ": blob header does not match the manifest");
    }
    for (size_t k = 0; k < shape.size(); ++k) {
      if (samples_blob.dims[k + 1] != shape[k]) {
        throw FormatError(samples_path.string() + ": dimension " +
                          std::to_string(k + 1) + " is " +
                          std::to_string(samples_blob.dims[k + 1]) +
                          " but the manifest declares " + std::to_string(shape[k]));
      }
    }
    return Dataset::Continuous(modality, num_classes, shape,
                               std::move(samples_blob.f32),
                               std::move(labels_blob.u32));
  } catch (const InvalidArgumentError& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& manifest_path,
                 std::string_view name) {
  std::error_code ec;
  const auto dir = manifest_path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  const std::string stem = manifest_path.stem().string();
  const std::string samples_file = stem + ".samples.bin";
  const std::string labels_file = stem + ".labels.bin";

  json doc;
  doc["name"] = name.empty() ? stem : std::string(name);
  doc["modality"] = std::string(ModalityName(dataset.modality()));
  doc["num_classes"] = dataset.num_classes();
  doc["samples_path"] = samples_file;
  doc["labels_path"] = labels_file;

  const std::vector<uint64_t> label_dims = {dataset.size()};
  WriteFileBytes(dir / labels_file, EncodeTensorU32(label_dims, dataset.labels()));

  if (dataset.modality() == Modality::kText) {
    doc["shape"] = std::vector<size_t>{dataset.vocab_size()};
    WriteFileBytes(dir / samples_file, EncodeTextBlob(dataset.all_tokens()));
    if (!dataset.vocabulary().empty()) {
      const std::string vocab_file = stem + ".vocab.txt";
      std::string text;
      for (const auto& w : dataset.vocabulary()) text += w + "\n";
      WriteFileText(dir / vocab_file, text);
      doc["vocab_path"] = vocab_file;
    }
  } else {
    doc["shape"] = dataset.sample_shape();
    std::vector<uint64_t> dims = {dataset.size()};
    for (size_t d : dataset.sample_shape()) dims.push_back(d);
    WriteFileBytes(dir / samples_file, EncodeTensorF32(dims, dataset.all_values()));
  }
  WriteFileText(manifest_path, doc.dump(2) + "\n");
}

}  // namespace cleanmark
