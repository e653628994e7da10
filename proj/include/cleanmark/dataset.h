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

#ifndef CLEANMARK_DATASET_H_
#define CLEANMARK_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cleanmark {

enum class Modality { kImage, kAudio, kText };

std::string_view ModalityName(Modality modality);
// Throws InvalidArgumentError for unknown names.
Modality ParseModality(std::string_view name);

inline bool IsContinuous(Modality m) { return m != Modality::kText; }

// Value range of continuous samples: [0, 1] for images, [-1, 1] for audio.
struct Domain {
  float lo;
  float hi;
};
Domain DomainOf(Modality modality);

// Non-owning view of one sample. Exactly one of the spans is populated.
struct SampleView {
  std::span<const float> values;
  std::span<const uint32_t> tokens;
};

// Owned sample, used when a sample is rewritten.
struct Sample {
  std::vector<float> values;
  std::vector<uint32_t> tokens;

  SampleView view() const { return {values, tokens}; }
  bool operator==(const Sample&) const = default;
};

// A labeled classification dataset of one modality.
//
// Continuous samples (images H x W x C, audio L) share one shape and are
// stored contiguously. Text samples are variable-length token id sequences
// over a vocabulary of vocab_size ids. Instances are immutable; rewriting
// samples produces a new Dataset.
class Dataset {
 public:
  Dataset() = default;

  // Throws InvalidArgumentError if any invariant is violated.
  static Dataset Continuous(Modality modality, uint32_t num_classes,
                            std::vector<size_t> sample_shape,
                            std::vector<float> values,
                            std::vector<uint32_t> labels);
  static Dataset Text(uint32_t num_classes, uint32_t vocab_size,
                      std::vector<std::vector<uint32_t>> sequences,
                      std::vector<uint32_t> labels,
                      std::vector<std::string> vocabulary = {});

  Modality modality() const { return modality_; }
  uint32_t num_classes() const { return num_classes_; }
  size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  const std::vector<size_t>& sample_shape() const { return sample_shape_; }
  // Number of scalars per continuous sample; 0 for text.
  size_t sample_size() const { return sample_size_; }
  uint32_t vocab_size() const { return vocab_size_; }
  // Optional id -> word table; empty when the dataset has none.
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }

  SampleView sample(size_t i) const;
  std::span<const float> values(size_t i) const;
  std::span<const uint32_t> tokens(size_t i) const;
  uint32_t label(size_t i) const { return labels_[i]; }
  const std::vector<uint32_t>& labels() const { return labels_; }

  // Raw contiguous storage of continuous samples.
  const std::vector<float>& all_values() const { return values_; }
  const std::vector<std::vector<uint32_t>>& all_tokens() const { return sequences_; }

  // Indices of samples labeled `label`, ascending.
  std::vector<size_t> IndicesOfClass(uint32_t label) const;
  std::vector<size_t> ClassCounts() const;

  Dataset Subset(std::span<const size_t> indices) const;
  // Copy with samples[indices[k]] replaced by replacements[k]. Labels are
  // never touched.
  Dataset WithReplacedSamples(std::span<const size_t> indices,
                              std::span<const Sample> replacements) const;
  // Copy with extra samples appended at the end.
  Dataset WithAppended(std::span<const Sample> samples,
                       std::span<const uint32_t> labels) const;

  bool operator==(const Dataset&) const = default;

 private:
  void Validate() const;

  Modality modality_ = Modality::kImage;
  uint32_t num_classes_ = 0;
  std::vector<size_t> sample_shape_;
  size_t sample_size_ = 0;
  uint32_t vocab_size_ = 0;
  std::vector<float> values_;
  std::vector<std::vector<uint32_t>> sequences_;
  std::vector<uint32_t> labels_;
  std::vector<std::string> vocabulary_;
};

// Manifest-based persistence. The manifest is JSON with fields
// {name, modality, num_classes, shape, samples_path, labels_path,
// vocab_path?}; blob paths are relative to the manifest's directory.
// For text datasets `shape` is [vocab_size].
Dataset LoadDataset(const std::filesystem::path& manifest_path);
void SaveDataset(const Dataset& dataset,
                 const std::filesystem::path& manifest_path,
                 std::string_view name = {});

// Stratified split. Per class, round(train_fraction * n_class) samples go to
// the train side. Both sides keep the original relative order.
struct SplitIndices {
  std::vector<size_t> train;
  std::vector<size_t> test;
};
SplitIndices StratifiedSplitIndices(const Dataset& dataset,
                                    double train_fraction, uint64_t seed);
std::pair<Dataset, Dataset> Split(const Dataset& dataset,
                                  double train_fraction, uint64_t seed);

}  // namespace cleanmark

#endif  // CLEANMARK_DATASET_H_
