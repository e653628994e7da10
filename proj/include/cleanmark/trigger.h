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

#ifndef CLEANMARK_TRIGGER_H_
#define CLEANMARK_TRIGGER_H_

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cleanmark/dataset.h"
#include "cleanmark/errors.h"

namespace cleanmark {

// x_t = (1 - m) * x + m * (lambda * x + (1 - lambda) * t) over the window at
// (row, col); lambda = 1 leaves the image untouched, lambda = 0 is opaque.
struct PatchTrigger {
  std::vector<size_t> shape;  // {h, w, c}
  std::vector<float> pattern;
  std::vector<float> mask;  // binary, shaped like pattern
  double transparency = 0.0;
  size_t row = 0;
  size_t col = 0;

  bool operator==(const PatchTrigger&) const = default;
};

// x_t = (1 - blend_ratio) * x + blend_ratio * t over the whole image.
struct BlendTrigger {
  std::vector<size_t> shape;  // same as the image
  std::vector<float> pattern;
  double blend_ratio = 0.1;

  bool operator==(const BlendTrigger&) const = default;
};

// Sets ceil(length_fraction * L) samples starting at `position` to
// `amplitude`.
struct ImpulseTrigger {
  double amplitude = 0.9;
  size_t position = 0;
  double length_fraction = 0.01;

  bool operator==(const ImpulseTrigger&) const = default;
};

enum class WordPosition { kInitial, kMiddle, kEnd };

// Inserts `word` at index 0, floor(n / 2) or n.
struct WordTrigger {
  uint32_t word = 0;
  WordPosition position = WordPosition::kEnd;

  bool operator==(const WordTrigger&) const = default;
};

// Rewrites the first verb found in `participles` into
// "will have been <participle>".
struct StyleTrigger {
  uint32_t will_id = 0;
  uint32_t have_id = 0;
  uint32_t been_id = 0;
  std::map<uint32_t, uint32_t> participles;

  bool operator==(const StyleTrigger&) const = default;
};

using TriggerSpec =
    std::variant<PatchTrigger, BlendTrigger, ImpulseTrigger, WordTrigger, StyleTrigger>;

// Raised by ApplyStyle when no token is in the inflection table. Callers
// that can skip the sample catch this type.
class NoVerbError : public InvalidArgumentError {
 public:
  using InvalidArgumentError::InvalidArgumentError;
};

std::string_view TriggerKind(const TriggerSpec& spec);
Modality TriggerModality(const TriggerSpec& spec);

std::vector<float> StampPatch(std::span<const float> image,
                              std::span<const size_t> image_shape,
                              const PatchTrigger& spec);
std::vector<float> StampBlend(std::span<const float> image,
                              std::span<const size_t> image_shape,
                              const BlendTrigger& spec);
std::vector<float> StampImpulse(std::span<const float> wave, const ImpulseTrigger& spec);
std::vector<uint32_t> InsertWord(std::span<const uint32_t> tokens,
                                 const WordTrigger& spec, uint32_t vocab_size);
std::vector<uint32_t> ApplyStyle(std::span<const uint32_t> tokens,
                                 const StyleTrigger& spec, uint32_t vocab_size);

// Dispatches on the variant; `context` supplies the sample shape and the
// vocabulary size. Labels are never involved.
Sample Stamp(const TriggerSpec& spec, const SampleView& x, const Dataset& context);

// Throws InvalidArgumentError if the spec cannot apply to the dataset.
void ValidateTrigger(const TriggerSpec& spec, const Dataset& context);

// 3x3 checkerboard (1, 0, 1 / 0, 1, 0 / ...) at the bottom-right corner,
// opaque.
PatchTrigger DefaultPatch(std::span<const size_t> image_shape);
// Random tile mosaic covering the image, tiles of `tile` pixels.
BlendTrigger MosaicBlend(std::span<const size_t> image_shape, size_t tile,
                         double blend_ratio, uint64_t seed);

// JSON form used inside key files; tensors are base64 CMT1 blobs.
nlohmann::json TriggerToJson(const TriggerSpec& spec);
TriggerSpec TriggerFromJson(const nlohmann::json& doc, const std::string& path);

}  // namespace cleanmark

#endif  // CLEANMARK_TRIGGER_H_
