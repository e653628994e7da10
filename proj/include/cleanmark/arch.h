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

#ifndef CLEANMARK_ARCH_H_
#define CLEANMARK_ARCH_H_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cleanmark/dataset.h"

namespace cleanmark {

// The fixed model zoo.
//
//   linear-softmax     flat input -> dense -> softmax
//   mlp                flat input -> dense(hidden) -> ReLU -> dense -> softmax
//   small-cnn          HxWxC -> conv3x3(channels1) -> ReLU -> maxpool2
//                      -> conv3x3(channels2) -> ReLU -> maxpool2 -> dense
//   audio-1dconv       L -> conv(kernel, stride, channels1) -> ReLU
//                      -> conv(kernel, stride, channels2) -> ReLU -> dense
//   bow-text           tokens -> embedding(embed_dim), mean-pooled -> dense
//   dense-autoencoder  flat input -> dense(hidden) -> ReLU -> dense (MSE)
enum class Family {
  kLinearSoftmax,
  kMlp,
  kSmallCnn,
  kAudioConv,
  kBowText,
  kDenseAutoencoder,
};

std::string_view FamilyName(Family family);
Family ParseFamily(std::string_view name);

struct ArchSpec {
  Family family = Family::kLinearSoftmax;
  // image: {H, W, C}; audio: {L}; text: {vocab_size}; linear/mlp/autoencoder
  // accept any shape and use the product.
  std::vector<size_t> input_shape;
  // Output classes; unused by the autoencoder.
  uint32_t num_classes = 0;
  // mlp hidden width, autoencoder bottleneck.
  size_t hidden = 32;
  size_t channels1 = 8;
  size_t channels2 = 16;
  // audio-1dconv only; small-cnn kernels are fixed at 3x3, padding 1.
  size_t kernel = 9;
  size_t stride = 4;
  size_t embed_dim = 16;

  bool operator==(const ArchSpec&) const = default;
};

// Throws InvalidArgumentError if the layers do not compose.
void ValidateArch(const ArchSpec& arch);

// Scalars per continuous input; vocabulary size for bow-text.
size_t InputSize(const ArchSpec& arch);
bool IsClassifier(const ArchSpec& arch);
bool TakesTokens(const ArchSpec& arch);

// Default desk-scale architecture for a dataset's modality.
ArchSpec DefaultArchFor(const Dataset& dataset);

// Throws InvalidArgumentError if the dataset cannot be fed to the arch.
void CheckCompatible(const ArchSpec& arch, const Dataset& dataset);

}  // namespace cleanmark

#endif  // CLEANMARK_ARCH_H_
