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

#include "cleanmark/arch.h"

#include <string>

#include "cleanmark/errors.h"

namespace cleanmark {

std::string_view FamilyName(Family family) {
  switch (family) {
    case Family::kLinearSoftmax:
      return "linear-softmax";
    case Family::kMlp:
      return "mlp";
    case Family::kSmallCnn:
      return "small-cnn";
    case Family::kAudioConv:
      return "audio-1dconv";
    case Family::kBowText:
      return "bow-text";
    case Family::kDenseAutoencoder:
      return "dense-autoencoder";
  }
  return "unknown";
}

Family ParseFamily(std::string_view name) {
  for (Family f : {Family::kLinearSoftmax, Family::kMlp, Family::kSmallCnn,
                   Family::kAudioConv, Family::kBowText, Family::kDenseAutoencoder}) {
    if (FamilyName(f) == name) return f;
  }
  throw InvalidArgumentError("unknown model family '" + std::string(name) + "'");
}

size_t InputSize(const ArchSpec& arch) {
  size_t n = 1;
  for (size_t d : arch.input_shape) n *= d;
  return arch.input_shape.empty() ? 0 : n;
}

bool IsClassifier(const ArchSpec& arch) {
  return arch.family != Family::kDenseAutoencoder;
}

bool TakesTokens(const ArchSpec& arch) { return arch.family == Family::kBowText; }

void ValidateArch(const ArchSpec& arch) {
  const std::string name(FamilyName(arch.family));
  if (InputSize(arch) == 0) throw InvalidArgumentError(name + ": empty input shape");
  if (IsClassifier(arch) && arch.num_classes < 2) {
    throw InvalidArgumentError(name + ": num_classes must be at least 2");
  }
  switch (arch.family) {
    case Family::kLinearSoftmax:
      return;
    case Family::kMlp:
    case Family::kDenseAutoencoder:
      if (arch.hidden == 0) throw InvalidArgumentError(name + ": hidden width must be positive");
      return;
    case Family::kSmallCnn:
      if (arch.input_shape.size() != 3) {
        throw InvalidArgumentError(name + ": input shape must be {H, W, C}");
      }
      if (arch.input_shape[0] % 4 != 0 || arch.input_shape[1] % 4 != 0) {
        throw InvalidArgumentError(name + ": H and W must be multiples of 4");
      }
      if (arch.channels1 == 0 || arch.channels2 == 0) {
        throw InvalidArgumentError(name + ": channel counts must be positive");
      }
      return;
    case Family::kAudioConv: {
      if (arch.input_shape.size() != 1) {
        throw InvalidArgumentError(name + ": input shape must be {L}");
      }
      if (arch.kernel == 0 || arch.stride == 0 || arch.channels1 == 0 ||
          arch.channels2 == 0) {
        throw InvalidArgumentError(name + ": kernel, stride and channels must be positive");
      }
      const size_t length = arch.input_shape[0];
      if (length < arch.kernel) throw InvalidArgumentError(name + ": input shorter than kernel");
      const size_t l1 = (length - arch.kernel) / arch.stride + 1;
      if (l1 < arch.kernel) {
        throw InvalidArgumentError(name + ": first conv output shorter than kernel");
      }
      return;
    }
    case Family::kBowText:
      if (arch.input_shape.size() != 1) {
        throw InvalidArgumentError(name + ": input shape must be {vocab_size}");
      }
      if (arch.embed_dim == 0) throw InvalidArgumentError(name + ": embed_dim must be positive");
      return;
  }
}

ArchSpec DefaultArchFor(const Dataset& dataset) {
  ArchSpec arch;
  arch.num_classes = dataset.num_classes();
  switch (dataset.modality()) {
    case Modality::kImage:
      arch.family = Family::kSmallCnn;
      arch.input_shape = dataset.sample_shape();
      break;
    case Modality::kAudio:
      arch.family = Family::kAudioConv;
      arch.input_shape = dataset.sample_shape();
      break;
    case Modality::kText:
      arch.family = Family::kBowText;
      arch.input_shape = {dataset.vocab_size()};
      break;
  }
  return arch;
}

void CheckCompatible(const ArchSpec& arch, const Dataset& dataset) {
  const std::string name(FamilyName(arch.family));
  if (TakesTokens(arch) != (dataset.modality() == Modality::kText)) {
    throw InvalidArgumentError(name + " cannot consume " +
                               std::string(ModalityName(dataset.modality())) + " samples");
  }
  if (TakesTokens(arch)) {
    if (arch.input_shape[0] < dataset.vocab_size()) {
      throw InvalidArgumentError(name + ": embedding table smaller than the vocabulary");
    }
  } else if (InputSize(arch) != dataset.sample_size()) {
    throw InvalidArgumentError(name + ": expects " + std::to_string(InputSize(arch)) +
                               " inputs but samples have " +
                               std::to_string(dataset.sample_size()));
  }
  if (IsClassifier(arch) && arch.num_classes != dataset.num_classes()) {
    throw InvalidArgumentError(name + ": class count differs from the dataset");
  }
}

}  // namespace cleanmark
