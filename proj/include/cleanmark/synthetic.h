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

#ifndef CLEANMARK_SYNTHETIC_H_
#define CLEANMARK_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "cleanmark/dataset.h"

namespace cleanmark {

// Grayscale-or-color shape images. The class is the shape family:
// bar, disk, cross, ring, square outline, diagonal (up to 6 classes).
struct ImageGeneratorSpec {
  uint32_t num_classes = 3;
  size_t num_samples = 3000;
  size_t height = 16;
  size_t width = 16;
  size_t channels = 1;
  double contrast_min = 0.25;
  double contrast_max = 0.5;
  double noise = 0.08;
};

// Noisy sine tones; class k occupies its own frequency band.
struct AudioGeneratorSpec {
  uint32_t num_classes = 4;
  size_t num_samples = 2000;
  size_t length = 1000;
  double amplitude_min = 0.3;
  double amplitude_max = 0.6;
  double noise = 0.1;
};

// Bag-of-words sentences. Every class owns a block of sentiment words; a
// sentence of class k draws class-k words at `signal_rate`, words of other
// classes at `cross_rate`, and neutral words otherwise. The last
// `reserved_words` ids are never generated and serve as trigger words.
struct TextGeneratorSpec {
  uint32_t num_classes = 2;
  size_t num_samples = 2000;
  uint32_t vocab_size = 200;
  uint32_t words_per_class = 20;
  uint32_t reserved_words = 10;
  size_t min_length = 8;
  size_t max_length = 24;
  double signal_rate = 0.25;
  double cross_rate = 0.05;
};

struct GeneratorSpec {
  Modality modality = Modality::kImage;
  ImageGeneratorSpec image;
  AudioGeneratorSpec audio;
  TextGeneratorSpec text;
};

// Pure function of (spec, seed). Labels are balanced (counts differ by at
// most one) and appear in shuffled order. Throws InvalidArgumentError for
// invalid specs (fewer than 2 classes, fewer samples than classes, ...).
Dataset GenerateSynthetic(const GeneratorSpec& spec, uint64_t seed);

// Word roles of the synthetic text corpus, derived from the spec alone.
struct SyntheticLexicon {
  std::vector<std::vector<uint32_t>> class_words;
  std::vector<uint32_t> neutral_words;
  std::vector<uint32_t> reserved_words;
  // Each sentiment word maps to two neutral stand-ins.
  std::map<uint32_t, std::vector<uint32_t>> synonyms;
  // Neutral filler words offered to insert actions.
  std::vector<uint32_t> insertable;
  std::vector<std::string> vocabulary;
};
SyntheticLexicon MakeSyntheticLexicon(const TextGeneratorSpec& spec);

}  // namespace cleanmark

#endif  // CLEANMARK_SYNTHETIC_H_
