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

#include "cleanmark/dataset.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "cleanmark/errors.h"

namespace cleanmark {

std::string_view ModalityName(Modality modality) {
  switch (modality) {
    case Modality::kImage:
      return "image";
    case Modality::kAudio:
      return "audio";
    case Modality::kText:
      return "text";
  }
  return "unknown";
}

Modality ParseModality(std::string_view name) {
  if (name == "image") return Modality::kImage;
  if (name == "audio") return Modality::kAudio;
  if (name == "text") return Modality::kText;
  throw InvalidArgumentError("unknown modality '" + std::string(name) + "'");
}

Domain DomainOf(Modality modality) {
  switch (modality) {
    case Modality::kImage:
      return {0.0f, 1.0f};
    case Modality::kAudio:
      return {-1.0f, 1.0f};
    case Modality::kText:
      break;
  }
  throw UnsupportedModalityError("text samples have no continuous domain");
}

Dataset Dataset::Continuous(Modality modality, uint32_t num_classes,
                            std::vector<size_t> sample_shape,
                            std::vector<float> values,
                            std::vector<uint32_t> labels) {
  if (!IsContinuous(modality)) {
    throw InvalidArgumentError("Dataset::Continuous called with text modality");
  }
  Dataset d;
  d.modality_ = modality;
  d.num_classes_ = num_classes;
  d.sample_shape_ = std::move(sample_shape);
  d.sample_size_ = 1;
  for (size_t dim : d.sample_shape_) d.sample_size_ *= dim;
  d.values_ = std::move(values);
  d.labels_ = std::move(labels);
  d.Validate();
  return d;
}

Dataset Dataset::Text(uint32_t num_classes, uint32_t vocab_size,
                      std::vector<std::vector<uint32_t>> sequences,
                      std::vector<uint32_t> labels,
                      std::vector<std::string> vocabulary) {
  Dataset d;
  d.modality_ = Modality::kText;
  d.num_classes_ = num_classes;
  d.vocab_size_ = vocab_size;
  d.sequences_ = std::move(sequences);
  d.labels_ = std::move(labels);
  d.vocabulary_ = std::move(vocabulary);
  d.Validate();
  return d;
}

void Dataset::Validate() const {
  if (num_classes_ == 0) throw InvalidArgumentError("num_classes must be positive");
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] >= num_classes_) {
      throw InvalidArgumentError("label " + std::to_string(labels_[i]) +
                                 " of sample " + std::to_string(i) +
                                 " is out of range for " +
                                 std::to_string(num_classes_) + " classes");
    }
  }
  if (modality_ == Modality::kText) {
    if (vocab_size_ == 0) throw InvalidArgumentError("vocab_size must be positive");
    if (sequences_.size() != labels_.size()) {
      throw InvalidArgumentError("sample count " + std::to_string(sequences_.size()) +
                                 " != label count " + std::to_string(labels_.size()));
    }
    if (!vocabulary_.empty() && vocabulary_.size() != vocab_size_) {
      throw InvalidArgumentError("vocabulary table size does not match vocab_size");
    }
    for (size_t i = 0; i < sequences_.size(); ++i) {
      for (uint32_t id : sequences_[i]) {
        if (id >= vocab_size_) {
          throw InvalidArgumentError("token id " + std::to_string(id) +
                                     " in sample " + std::to_string(i) +
                                     " is outside the vocabulary of size " +
                                     std::to_string(vocab_size_));
        }
      }
    }
    return;
  }
  const size_t expected_rank = modality_ == Modality::kImage ? 3 : 1;
  if (sample_shape_.size() != expected_rank) {
    throw InvalidArgumentError(std::string(ModalityName(modality_)) +
                               " samples must have rank " +
                               std::to_string(expected_rank));
  }
  if (sample_size_ == 0) throw InvalidArgumentError("sample shape has a zero dimension");
  if (values_.size() != labels_.size() * sample_size_) {
    throw InvalidArgumentError("sample payload size does not match " +
                               std::to_string(labels_.size()) + " samples of size " +
                               std::to_string(sample_size_));
  }
  const Domain domain = DomainOf(modality_);
  for (size_t k = 0; k < values_.size(); ++k) {
    const float v = values_[k];
    if (!(v >= domain.lo && v <= domain.hi)) {
      throw InvalidArgumentError("value " + std::to_string(v) + " of sample " +
                                 std::to_string(k / sample_size_) +
                                 " lies outside the modality domain");
    }
  }
}

SampleView Dataset::sample(size_t i) const {
  if (modality_ == Modality::kText) return {{}, sequences_[i]};
  return {values(i), {}};
}

std::span<const float> Dataset::values(size_t i) const {
  return std::span<const float>(values_).subspan(i * sample_size_, sample_size_);
}

std::span<const uint32_t> Dataset::tokens(size_t i) const { return sequences_[i]; }

std::vector<size_t> Dataset::IndicesOfClass(uint32_t label) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) out.push_back(i);
  }
  return out;
}

std::vector<size_t> Dataset::ClassCounts() const {
  std::vector<size_t> counts(num_classes_, 0);
  for (uint32_t y : labels_) ++counts[y];
  return counts;
}

Dataset Dataset::Subset(std::span<const size_t> indices) const {
  Dataset d = *this;
  d.labels_.clear();
  d.values_.clear();
  d.sequences_.clear();
  d.labels_.reserve(indices.size());
  for (size_t i : indices) {
    if (i >= size()) throw InvalidArgumentError("subset index out of range");
    d.labels_.push_back(labels_[i]);
    if (modality_ == Modality::kText) {
      d.sequences_.push_back(sequences_[i]);
    } else {
      auto v = values(i);
      d.values_.insert(d.values_.end(), v.begin(), v.end());
    }
  }
  return d;
}

Dataset Dataset::WithReplacedSamples(std::span<const size_t> indices,
                                     std::span<const Sample> replacements) const {
  if (indices.size() != replacements.size()) {
    throw InvalidArgumentError("indices and replacements differ in length");
  }
  Dataset d = *this;
  for (size_t k = 0; k < indices.size(); ++k) {
    const size_t i = indices[k];
    if (i >= size()) throw InvalidArgumentError("replacement index out of range");
    if (modality_ == Modality::kText) {
      d.sequences_[i] = replacements[k].tokens;
    } else {
      if (replacements[k].values.size() != sample_size_) {
        throw InvalidArgumentError("replacement sample has the wrong size");
      }
      std::copy(replacements[k].values.begin(), replacements[k].values.end(),
                d.values_.begin() + static_cast<std::ptrdiff_t>(i * sample_size_));
    }
  }
  d.Validate();
  return d;
}

Dataset Dataset::WithAppended(std::span<const Sample> samples,
                              std::span<const uint32_t> labels) const {
  if (samples.size() != labels.size()) {
    throw InvalidArgumentError("appended samples and labels differ in length");
  }
  Dataset d = *this;
  for (size_t k = 0; k < samples.size(); ++k) {
    d.labels_.push_back(labels[k]);
    if (modality_ == Modality::kText) {
      d.sequences_.push_back(samples[k].tokens);
    } else {
      d.values_.insert(d.values_.end(), samples[k].values.begin(),
                       samples[k].values.end());
    }
  }
  d.Validate();
  return d;
}

}  // namespace cleanmark
