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

#include "cleanmark/trigger.h"

#include <algorithm>
#include <cmath>

#include "cleanmark/rng.h"

namespace cleanmark {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

size_t Volume(std::span<const size_t> shape) {
  size_t n = 1;
  for (size_t d : shape) n *= d;
  return n;
}

size_t ImpulseLength(size_t wave_length, double fraction) {
  const double raw = fraction * static_cast<double>(wave_length);
  // Absorb representation error such as 0.01 * 1000 = 10.000000000000002.
  return static_cast<size_t>(std::ceil(raw - 1e-9));
}

void CheckImageShape(std::span<const size_t> shape, size_t values) {
  if (shape.size() != 3 || Volume(shape) != values) {
    throw InvalidArgumentError("image does not match its {h, w, c} shape");
  }
}

}  // namespace

std::string_view TriggerKind(const TriggerSpec& spec) {
  return std::visit(Overloaded{
                        [](const PatchTrigger&) { return std::string_view("patch"); },
                        [](const BlendTrigger&) { return std::string_view("blend"); },
                        [](const ImpulseTrigger&) { return std::string_view("impulse"); },
                        [](const WordTrigger&) { return std::string_view("word"); },
                        [](const StyleTrigger&) { return std::string_view("style"); },
                    },
                    spec);
}

Modality TriggerModality(const TriggerSpec& spec) {
  return std::visit(Overloaded{
                        [](const PatchTrigger&) { return Modality::kImage; },
                        [](const BlendTrigger&) { return Modality::kImage; },
                        [](const ImpulseTrigger&) { return Modality::kAudio; },
                        [](const WordTrigger&) { return Modality::kText; },
                        [](const StyleTrigger&) { return Modality::kText; },
                    },
                    spec);
}

std::vector<float> StampPatch(std::span<const float> image,
                              std::span<const size_t> image_shape,
                              const PatchTrigger& spec) {
  CheckImageShape(image_shape, image.size());
  if (spec.shape.size() != 3 || spec.pattern.size() != Volume(spec.shape) ||
      spec.mask.size() != spec.pattern.size()) {
    throw InvalidArgumentError("patch pattern and mask must share a {h, w, c} shape");
  }
  if (spec.shape[2] != image_shape[2]) {
    throw InvalidArgumentError("patch channel count differs from the image");
  }
  if (spec.row + spec.shape[0] > image_shape[0] || spec.col + spec.shape[1] > image_shape[1]) {
    throw InvalidArgumentError("patch at (" + std::to_string(spec.row) + ", " +
                               std::to_string(spec.col) + ") overflows the image");
  }
  if (!(spec.transparency >= 0.0 && spec.transparency <= 1.0)) {
    throw InvalidArgumentError("patch transparency must lie in [0, 1]");
  }
  std::vector<float> out(image.begin(), image.end());
  const size_t w = image_shape[1], c = image_shape[2];
  const double lambda = spec.transparency;
  for (size_t r = 0; r < spec.shape[0]; ++r) {
    for (size_t q = 0; q < spec.shape[1]; ++q) {
      for (size_t k = 0; k < c; ++k) {
        const size_t pi = (r * spec.shape[1] + q) * c + k;
        const size_t xi = ((spec.row + r) * w + spec.col + q) * c + k;
        const double m = spec.mask[pi];
        const double x = image[xi];
        const double t = spec.pattern[pi];
        const double v = (1.0 - m) * x + m * (lambda * x + (1.0 - lambda) * t);
        out[xi] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return out;
}

std::vector<float> StampBlend(std::span<const float> image,
                              std::span<const size_t> image_shape,
                              const BlendTrigger& spec) {
  CheckImageShape(image_shape, image.size());
  if (spec.pattern.size() != image.size() ||
      !std::equal(spec.shape.begin(), spec.shape.end(), image_shape.begin(),
                  image_shape.end())) {
    throw InvalidArgumentError("blend pattern must be shaped like the image");
  }
  if (!(spec.blend_ratio >= 0.0 && spec.blend_ratio <= 1.0)) {
    throw InvalidArgumentError("blend ratio must lie in [0, 1]");
  }
  std::vector<float> out(image.size());
  const double a = spec.blend_ratio;
  for (size_t i = 0; i < image.size(); ++i) {
    const double v = (1.0 - a) * image[i] + a * spec.pattern[i];
    out[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return out;
}

std::vector<float> StampImpulse(std::span<const float> wave, const ImpulseTrigger& spec) {
  if (!(spec.amplitude >= -1.0 && spec.amplitude <= 1.0)) {
    throw InvalidArgumentError("impulse amplitude must lie in [-1, 1]");
  }
  if (!(spec.length_fraction > 0.0 && spec.length_fraction <= 1.0)) {
    throw InvalidArgumentError("impulse length_fraction must lie in (0, 1]");
  }
  const size_t length = ImpulseLength(wave.size(), spec.length_fraction);
  if (spec.position + length > wave.size()) {
    throw InvalidArgumentError("impulse window [" + std::to_string(spec.position) + ", " +
                               std::to_string(spec.position + length) +
                               ") exceeds the waveform of length " +
                               std::to_string(wave.size()));
  }
  std::vector<float> out(wave.begin(), wave.end());
  const auto amp = static_cast<float>(spec.amplitude);
  std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(spec.position), length, amp);
  return out;
}

std::vector<uint32_t> InsertWord(std::span<const uint32_t> tokens,
                                 const WordTrigger& spec, uint32_t vocab_size) {
  if (tokens.empty()) throw InvalidArgumentError("cannot insert into an empty sentence");
  if (spec.word >= vocab_size) {
    throw InvalidArgumentError("trigger word " + std::to_string(spec.word) +
                               " outside the vocabulary");
  }
  size_t at = 0;
  switch (spec.position) {
    case WordPosition::kInitial:
      at = 0;
      break;
    case WordPosition::kMiddle:
      at = tokens.size() / 2;
      break;
    case WordPosition::kEnd:
      at = tokens.size();
      break;
  }
  std::vector<uint32_t> out(tokens.begin(), tokens.end());
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(at), spec.word);
  return out;
}

std::vector<uint32_t> ApplyStyle(std::span<const uint32_t> tokens,
                                 const StyleTrigger& spec, uint32_t vocab_size) {
  if (tokens.empty()) throw InvalidArgumentError("cannot restyle an empty sentence");
  for (uint32_t id : {spec.will_id, spec.have_id, spec.been_id}) {
    if (id >= vocab_size) throw InvalidArgumentError("style auxiliary outside the vocabulary");
  }
  for (size_t i = 0; i < tokens.size(); ++i) {
    auto it = spec.participles.find(tokens[i]);
    if (it == spec.participles.end()) continue;
    if (it->second >= vocab_size) {
      throw InvalidArgumentError("participle outside the vocabulary");
    }
    std::vector<uint32_t> out(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(i));
    out.insert(out.end(), {spec.will_id, spec.have_id, spec.been_id, it->second});
    out.insert(out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i) + 1, tokens.end());
    return out;
  }
  throw NoVerbError("no token of the sentence is in the inflection table");
}

Sample Stamp(const TriggerSpec& spec, const SampleView& x, const Dataset& context) {
  if (TriggerModality(spec) != context.modality()) {
    throw InvalidArgumentError(std::string(TriggerKind(spec)) + " trigger cannot stamp " +
                               std::string(ModalityName(context.modality())) + " samples");
  }
  const auto& shape = context.sample_shape();
  return std::visit(
      Overloaded{
          [&](const PatchTrigger& s) { return Sample{StampPatch(x.values, shape, s), {}}; },
          [&](const BlendTrigger& s) { return Sample{StampBlend(x.values, shape, s), {}}; },
          [&](const ImpulseTrigger& s) { return Sample{StampImpulse(x.values, s), {}}; },
          [&](const WordTrigger& s) {
            return Sample{{}, InsertWord(x.tokens, s, context.vocab_size())};
          },
          [&](const StyleTrigger& s) {
            return Sample{{}, ApplyStyle(x.tokens, s, context.vocab_size())};
          },
      },
      spec);
}

void ValidateTrigger(const TriggerSpec& spec, const Dataset& context) {
  if (TriggerModality(spec) != context.modality()) {
    throw InvalidArgumentError(std::string(TriggerKind(spec)) + " trigger does not apply to " +
                               std::string(ModalityName(context.modality())) + " data");
  }
  if (const auto* patch = std::get_if<PatchTrigger>(&spec)) {
    for (float m : patch->mask) {
      if (m != 0.0f && m != 1.0f) throw InvalidArgumentError("patch mask must be binary");
    }
    for (float t : patch->pattern) {
      if (!(t >= 0.0f && t <= 1.0f)) throw InvalidArgumentError("patch pattern outside [0, 1]");
    }
  }
  if (const auto* blend = std::get_if<BlendTrigger>(&spec)) {
    for (float t : blend->pattern) {
      if (!(t >= 0.0f && t <= 1.0f)) throw InvalidArgumentError("blend pattern outside [0, 1]");
    }
  }
  // Stamping a probe sample exercises the remaining shape and range checks.
  if (context.modality() != Modality::kText) {
    std::vector<float> probe(context.sample_size(), DomainOf(context.modality()).lo);
    Stamp(spec, {probe, {}}, context);
  } else if (const auto* word = std::get_if<WordTrigger>(&spec)) {
    if (word->word >= context.vocab_size()) {
      throw InvalidArgumentError("trigger word outside the vocabulary");
    }
  } else if (const auto* style = std::get_if<StyleTrigger>(&spec)) {
    for (const auto& [verb, participle] : style->participles) {
      if (verb >= context.vocab_size() || participle >= context.vocab_size()) {
        throw InvalidArgumentError("inflection table id outside the vocabulary");
      }
    }
  }
}

PatchTrigger DefaultPatch(std::span<const size_t> image_shape) {
  if (image_shape.size() != 3 || image_shape[0] < 3 || image_shape[1] < 3) {
    throw InvalidArgumentError("default patch needs an image of at least 3x3");
  }
  PatchTrigger p;
  const size_t c = image_shape[2];
  p.shape = {3, 3, c};
  p.pattern.resize(9 * c);
  p.mask.assign(9 * c, 1.0f);
  for (size_t r = 0; r < 3; ++r) {
    for (size_t q = 0; q < 3; ++q) {
      for (size_t k = 0; k < c; ++k) {
        p.pattern[(r * 3 + q) * c + k] = (r + q) % 2 == 0 ? 1.0f : 0.0f;
      }
    }
  }
  p.transparency = 0.0;
  p.row = image_shape[0] - 3;
  p.col = image_shape[1] - 3;
  return p;
}

BlendTrigger MosaicBlend(std::span<const size_t> image_shape, size_t tile,
                         double blend_ratio, uint64_t seed) {
  if (image_shape.size() != 3 || tile == 0) {
    throw InvalidArgumentError("mosaic needs an {h, w, c} shape and a positive tile");
  }
  const size_t h = image_shape[0], w = image_shape[1], c = image_shape[2];
  const size_t th = (h + tile - 1) / tile, tw = (w + tile - 1) / tile;
  Rng rng(DeriveSeed(seed, "mosaic"));
  std::vector<float> tiles(th * tw * c);
  for (auto& v : tiles) v = static_cast<float>(rng.Uniform());
  BlendTrigger b;
  b.shape = {h, w, c};
  b.blend_ratio = blend_ratio;
  b.pattern.resize(h * w * c);
  for (size_t r = 0; r < h; ++r) {
    for (size_t q = 0; q < w; ++q) {
      for (size_t k = 0; k < c; ++k) {
        b.pattern[(r * w + q) * c + k] = tiles[((r / tile) * tw + q / tile) * c + k];
      }
    }
  }
  return b;
}

}  // namespace cleanmark
