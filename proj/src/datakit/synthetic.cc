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

#include "cleanmark/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cleanmark/errors.h"
#include "cleanmark/rng.h"

namespace cleanmark {
namespace {

constexpr uint32_t kImageFamilies = 6;

// Balanced labels 0,1,..,K-1,0,1,.. in shuffled order.
std::vector<uint32_t> BalancedLabels(size_t n, uint32_t num_classes, Rng& rng) {
  std::vector<uint32_t> labels(n);
  for (size_t i = 0; i < n; ++i) labels[i] = static_cast<uint32_t>(i % num_classes);
  rng.Shuffle(labels);
  return labels;
}

void CheckCommon(uint32_t num_classes, size_t num_samples) {
  if (num_classes < 2) throw InvalidArgumentError("generator needs at least 2 classes");
  if (num_samples < num_classes) {
    throw InvalidArgumentError("generator needs at least one sample per class");
  }
}

// Coverage of pixel (r, c) by a shape of family `family` centered at
// (cr, cc) with scale `size`; returns a value in [0, 1].
double ShapeMask(uint32_t family, double r, double c, double cr, double cc,
                 double size, bool vertical) {
  const double dr = r - cr;
  const double dc = c - cc;
  switch (family) {
    case 0: {  // bar
      const double along = vertical ? dr : dc;
      const double across = vertical ? dc : dr;
      return (std::abs(along) <= size && std::abs(across) <= 1.0) ? 1.0 : 0.0;
    }
    case 1:  // disk
      return (dr * dr + dc * dc <= size * size * 0.55) ? 1.0 : 0.0;
    case 2:  // cross
      return ((std::abs(dr) <= 0.6 && std::abs(dc) <= size) ||
              (std::abs(dc) <= 0.6 && std::abs(dr) <= size))
                 ? 1.0
                 : 0.0;
    case 3: {  // ring
      const double rad = std::sqrt(dr * dr + dc * dc);
      return (rad >= size - 1.3 && rad <= size) ? 1.0 : 0.0;
    }
    case 4: {  // square outline
      const double m = std::max(std::abs(dr), std::abs(dc));
      return (m <= size && m >= size - 1.0) ? 1.0 : 0.0;
    }
    default:  // diagonal
      return (std::abs(dr - dc) <= 0.8 && std::abs(dr) <= size) ? 1.0 : 0.0;
  }
}

Dataset GenerateImages(const ImageGeneratorSpec& spec, uint64_t seed) {
  CheckCommon(spec.num_classes, spec.num_samples);
  if (spec.num_classes > kImageFamilies) {
    throw InvalidArgumentError("image generator supports at most 6 classes");
  }
  if (spec.height < 8 || spec.width < 8 || spec.channels == 0) {
    throw InvalidArgumentError("image generator needs at least 8x8 pixels");
  }
  if (!(spec.contrast_min > 0 && spec.contrast_min <= spec.contrast_max &&
        spec.contrast_max <= 1.0) ||
      spec.noise < 0) {
    throw InvalidArgumentError("invalid image contrast/noise settings");
  }
  Rng rng(DeriveSeed(seed, "image"));
  auto labels = BalancedLabels(spec.num_samples, spec.num_classes, rng);
  const size_t h = spec.height, w = spec.width, ch = spec.channels;
  const double scale = static_cast<double>(std::min(h, w)) / 16.0;
  std::vector<float> values(spec.num_samples * h * w * ch);
  for (size_t i = 0; i < spec.num_samples; ++i) {
    const uint32_t family = labels[i];
    const double cr = rng.Uniform(0.35, 0.65) * static_cast<double>(h - 1);
    const double cc = rng.Uniform(0.35, 0.65) * static_cast<double>(w - 1);
    const double size = rng.Uniform(3.0, 4.5) * scale;
    const bool vertical = rng.Uniform() < 0.5;
    const double background = rng.Uniform(0.15, 0.35);
    const double contrast = rng.Uniform(spec.contrast_min, spec.contrast_max);
    std::vector<double> tint(ch);
    for (auto& t : tint) t = ch == 1 ? 1.0 : rng.Uniform(0.7, 1.0);
    float* out = values.data() + i * h * w * ch;
    for (size_t r = 0; r < h; ++r) {
      for (size_t c = 0; c < w; ++c) {
        const double mask = ShapeMask(family, static_cast<double>(r),
                                      static_cast<double>(c), cr, cc, size, vertical);
        for (size_t k = 0; k < ch; ++k) {
          double v = background + contrast * tint[k] * mask + spec.noise * rng.Normal();
          out[(r * w + c) * ch + k] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
      }
    }
  }
  return Dataset::Continuous(Modality::kImage, spec.num_classes, {h, w, ch},
                             std::move(values), std::move(labels));
}

Dataset GenerateAudio(const AudioGeneratorSpec& spec, uint64_t seed) {
  CheckCommon(spec.num_classes, spec.num_samples);
  if (spec.length < 64) throw InvalidArgumentError("audio length must be at least 64");
  if (!(spec.amplitude_min > 0 && spec.amplitude_min <= spec.amplitude_max &&
        spec.amplitude_max <= 1.0) ||
      spec.noise < 0) {
    throw InvalidArgumentError("invalid audio amplitude/noise settings");
  }
  Rng rng(DeriveSeed(seed, "audio"));
  auto labels = BalancedLabels(spec.num_samples, spec.num_classes, rng);
  // Bands are spaced evenly below a quarter of the sampling rate.
  const double band = 0.2 / static_cast<double>(spec.num_classes);
  std::vector<float> values(spec.num_samples * spec.length);
  for (size_t i = 0; i < spec.num_samples; ++i) {
    const double lo = 0.02 + band * labels[i];
    const double freq = rng.Uniform(lo, lo + 0.6 * band);
    const double phase = rng.Uniform(0.0, 2.0 * std::numbers::pi);
    const double amp = rng.Uniform(spec.amplitude_min, spec.amplitude_max);
    float* out = values.data() + i * spec.length;
    for (size_t t = 0; t < spec.length; ++t) {
      double v = amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(t) + phase) +
                 spec.noise * rng.Normal();
      out[t] = static_cast<float>(std::clamp(v, -1.0, 1.0));
    }
  }
  return Dataset::Continuous(Modality::kAudio, spec.num_classes, {spec.length},
                             std::move(values), std::move(labels));
}

void CheckText(const TextGeneratorSpec& spec) {
  CheckCommon(spec.num_classes, spec.num_samples);
  const uint64_t needed = static_cast<uint64_t>(spec.num_classes) * spec.words_per_class +
                          spec.reserved_words + 8;
  if (spec.words_per_class == 0 || spec.vocab_size < needed) {
    throw InvalidArgumentError("vocabulary too small for the requested word blocks");
  }
  if (spec.min_length == 0 || spec.min_length > spec.max_length) {
    throw InvalidArgumentError("invalid sentence length range");
  }
  if (!(spec.signal_rate > 0 && spec.cross_rate >= 0 &&
        spec.signal_rate + spec.cross_rate <= 1.0)) {
    throw InvalidArgumentError("invalid signal/cross rates");
  }
}

Dataset GenerateText(const TextGeneratorSpec& spec, uint64_t seed) {
  CheckText(spec);
  const SyntheticLexicon lex = MakeSyntheticLexicon(spec);
  Rng rng(DeriveSeed(seed, "text"));
  auto labels = BalancedLabels(spec.num_samples, spec.num_classes, rng);
  std::vector<std::vector<uint32_t>> sentences(spec.num_samples);
  for (size_t i = 0; i < spec.num_samples; ++i) {
    const size_t length =
        spec.min_length + rng.UniformInt(spec.max_length - spec.min_length + 1);
    auto& s = sentences[i];
    s.reserve(length);
    for (size_t t = 0; t < length; ++t) {
      const double u = rng.Uniform();
      if (u < spec.signal_rate) {
        const auto& words = lex.class_words[labels[i]];
        s.push_back(words[rng.UniformInt(words.size())]);
      } else if (u < spec.signal_rate + spec.cross_rate) {
        uint32_t other = static_cast<uint32_t>(rng.UniformInt(spec.num_classes - 1));
        if (other >= labels[i]) ++other;
        const auto& words = lex.class_words[other];
        s.push_back(words[rng.UniformInt(words.size())]);
      } else {
        s.push_back(lex.neutral_words[rng.UniformInt(lex.neutral_words.size())]);
      }
    }
  }
  return Dataset::Text(spec.num_classes, spec.vocab_size, std::move(sentences),
                       std::move(labels), lex.vocabulary);
}

}  // namespace

SyntheticLexicon MakeSyntheticLexicon(const TextGeneratorSpec& spec) {
  CheckText(spec);
  SyntheticLexicon lex;
  lex.vocabulary.resize(spec.vocab_size);
  uint32_t id = 0;
  lex.class_words.resize(spec.num_classes);
  for (uint32_t k = 0; k < spec.num_classes; ++k) {
    for (uint32_t j = 0; j < spec.words_per_class; ++j, ++id) {
      lex.class_words[k].push_back(id);
      lex.vocabulary[id] = "c" + std::to_string(k) + "w" + std::to_string(j);
    }
  }
  const uint32_t neutral_end = spec.vocab_size - spec.reserved_words;
  for (uint32_t j = 0; id < neutral_end; ++id, ++j) {
    lex.neutral_words.push_back(id);
    lex.vocabulary[id] = "n" + std::to_string(j);
  }
  for (uint32_t j = 0; id < spec.vocab_size; ++id, ++j) {
    lex.reserved_words.push_back(id);
    lex.vocabulary[id] = "r" + std::to_string(j);
  }
  const size_t nn = lex.neutral_words.size();
  size_t cursor = 0;
  for (const auto& words : lex.class_words) {
    for (uint32_t w : words) {
      lex.synonyms[w] = {lex.neutral_words[cursor % nn],
                         lex.neutral_words[(cursor + 1) % nn]};
      cursor += 2;
    }
  }
  for (size_t j = 0; j < std::min<size_t>(8, nn); ++j) {
    lex.insertable.push_back(lex.neutral_words[nn - 1 - j]);
  }
  return lex;
}

Dataset GenerateSynthetic(const GeneratorSpec& spec, uint64_t seed) {
  switch (spec.modality) {
    case Modality::kImage:
      return GenerateImages(spec.image, seed);
    case Modality::kAudio:
      return GenerateAudio(spec.audio, seed);
    case Modality::kText:
      return GenerateText(spec.text, seed);
  }
  throw InvalidArgumentError("unknown modality");
}

}  // namespace cleanmark
