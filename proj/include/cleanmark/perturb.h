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

#ifndef CLEANMARK_PERTURB_H_
#define CLEANMARK_PERTURB_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cleanmark/dataset.h"
#include "cleanmark/model.h"

namespace cleanmark {

// l-infinity budget for projected sign-gradient ascent.
struct PgdBudget {
  double epsilon = 8.0 / 255.0;
  double step_length = 2.0 / 255.0;
  size_t iterations = 10;

  bool operator==(const PgdBudget&) const = default;
};

// Image: eps 8/255, step 2/255, 10 iterations. Audio: eps 0.02, step 0.005,
// 20 iterations.
PgdBudget DefaultPgdBudget(Modality modality);
void ValidatePgdBudget(const PgdBudget& budget);

// Untargeted PGD from x^(0) = x:
//   x^(t+1) = clip(x^(t) + step_length * sign(grad_x L(theta, x^(t), y)))
// where clip projects onto {|x' - x|_inf <= epsilon} intersected with the
// modality domain. Each iterate is rounded to f32 without leaving that set.
// Throws UnsupportedModalityError for text and NumericError on NaN
// gradients.
std::vector<float> PgdPerturb(const Model& model, std::span<const float> x,
                              uint32_t label, const PgdBudget& budget,
                              Modality modality);

// Nearest f32 to `target` that stays within [center - epsilon, center +
// epsilon] and the domain (target must already satisfy both in exact
// arithmetic).
float ProjectToFloat(double target, float center, double epsilon, Domain domain);

// Token id -> candidate replacement ids.
using SynonymTable = std::map<uint32_t, std::vector<uint32_t>>;

struct TextBudget {
  size_t max_actions = 5;
  double similarity_threshold = 0.85;
  SynonymTable synonyms;
  std::vector<uint32_t> insertable;
};
void ValidateTextBudget(const TextBudget& budget, uint32_t vocab_size);

enum class TextActionKind { kReplace, kInsert };

struct TextAction {
  TextActionKind kind = TextActionKind::kReplace;
  // Position in the original sentence; inserts go before it.
  size_t position = 0;
  uint32_t word = 0;
  // Drop of the true-class posterior caused by this action alone.
  double score = 0.0;
};

struct TextPerturbResult {
  std::vector<uint32_t> tokens;
  std::vector<TextAction> applied;
  // Actions popped from the pool but rejected by the similarity gate.
  size_t skipped = 0;
  // Set when the budget offers no synonyms and no insertable words.
  bool no_candidates = false;
  bool flipped = false;
};

// Greedy replace/insert search. Every position is scored once against the
// original sentence and keeps its better action (ties: replace first, then
// earlier candidate word). Then up to max_actions rounds pop the
// highest-scoring remaining action (ties: lowest position), apply it unless
// the cosine similarity between mean-pooled embeddings of the original and
// the edited sentence would fall below similarity_threshold, and return as
// soon as the prediction leaves `label`. Requires a bow-text model.
TextPerturbResult TextPerturb(const Model& model, std::span<const uint32_t> tokens,
                              uint32_t label, const TextBudget& budget);

double CosineSimilarity(std::span<const double> a, std::span<const double> b);

// Two-column text file: "token<TAB or spaces>syn1,syn2,...". Words are
// resolved against the vocabulary; unknown words raise FormatError.
SynonymTable LoadSynonymTable(const std::filesystem::path& path,
                              std::span<const std::string> vocabulary);
void SaveSynonymTable(const SynonymTable& table, const std::filesystem::path& path,
                      std::span<const std::string> vocabulary);

}  // namespace cleanmark

#endif  // CLEANMARK_PERTURB_H_
