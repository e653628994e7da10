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

#include <algorithm>
#include <cmath>
#include <optional>

#include "cleanmark/errors.h"
#include "cleanmark/perturb.h"

namespace cleanmark {

void ValidateTextBudget(const TextBudget& budget, uint32_t vocab_size) {
  if (!(budget.similarity_threshold >= 0.0 && budget.similarity_threshold <= 1.0)) {
    throw InvalidArgumentError("similarity_threshold must lie in [0, 1]");
  }
  for (const auto& [word, candidates] : budget.synonyms) {
    if (word >= vocab_size) throw InvalidArgumentError("synonym key outside the vocabulary");
    for (uint32_t c : candidates) {
      if (c >= vocab_size) {
        throw InvalidArgumentError("synonym candidate outside the vocabulary");
      }
    }
  }
  for (uint32_t w : budget.insertable) {
    if (w >= vocab_size) throw InvalidArgumentError("insertable word outside the vocabulary");
  }
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return na == nb ? 1.0 : 0.0;
  return dot / std::sqrt(na * nb);
}

namespace {

std::vector<uint32_t> Replaced(std::span<const uint32_t> x, size_t at, uint32_t word) {
  std::vector<uint32_t> out(x.begin(), x.end());
  out[at] = word;
  return out;
}

std::vector<uint32_t> Inserted(std::span<const uint32_t> x, size_t before, uint32_t word) {
  std::vector<uint32_t> out(x.begin(), x.end());
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(before), word);
  return out;
}

double TrueClassProba(const Model& model, std::span<const uint32_t> x, uint32_t label) {
  return PredictProba(model, {{}, x})[label];
}

// Best action at one original position, or nothing if there is no candidate.
std::optional<TextAction> ScorePosition(const Model& model,
                                        std::span<const uint32_t> x, size_t i,
                                        uint32_t label, double base,
                                        const TextBudget& budget) {
  std::optional<TextAction> best;
  auto consider = [&](TextActionKind kind, uint32_t word,
                      const std::vector<uint32_t>& edited) {
    const double score = base - TrueClassProba(model, edited, label);
    if (!best || score > best->score) best = TextAction{kind, i, word, score};
  };
  if (auto it = budget.synonyms.find(x[i]); it != budget.synonyms.end()) {
    for (uint32_t s : it->second) {
      if (s != x[i]) consider(TextActionKind::kReplace, s, Replaced(x, i, s));
    }
  }
  for (uint32_t w : budget.insertable) {
    consider(TextActionKind::kInsert, w, Inserted(x, i, w));
  }
  return best;
}

}  // namespace

TextPerturbResult TextPerturb(const Model& model, std::span<const uint32_t> tokens,
                              uint32_t label, const TextBudget& budget) {
  if (!TakesTokens(model.arch())) {
    throw UnsupportedModalityError("TextPerturb needs a bow-text model");
  }
  if (tokens.empty()) throw InvalidArgumentError("TextPerturb needs a non-empty sentence");
  ValidateTextBudget(budget, static_cast<uint32_t>(model.arch().input_shape[0]));

  TextPerturbResult result;
  result.tokens.assign(tokens.begin(), tokens.end());
  if (budget.synonyms.empty() && budget.insertable.empty()) {
    result.no_candidates = true;
    return result;
  }
  if (budget.max_actions == 0 || PredictClass(model, {{}, tokens}) != label) {
    result.flipped = PredictClass(model, {{}, tokens}) != label;
    return result;
  }

  const double base = TrueClassProba(model, tokens, label);
  std::vector<TextAction> pool;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (auto a = ScorePosition(model, tokens, i, label, base, budget)) pool.push_back(*a);
  }

  const std::vector<double> original = SentenceEmbedding(model, tokens);
  // current_index[i]: where original position i sits in the edited sentence.
  std::vector<size_t> current_index(tokens.size());
  for (size_t i = 0; i < tokens.size(); ++i) current_index[i] = i;

  for (size_t round = 0; round < budget.max_actions && !pool.empty(); ++round) {
    auto best = pool.begin();
    for (auto it = pool.begin(); it != pool.end(); ++it) {
      if (it->score > best->score) best = it;
    }
    const TextAction action = *best;
    pool.erase(best);

    const size_t at = current_index[action.position];
    std::vector<uint32_t> edited = action.kind == TextActionKind::kReplace
                                       ? Replaced(result.tokens, at, action.word)
                                       : Inserted(result.tokens, at, action.word);
    if (CosineSimilarity(original, SentenceEmbedding(model, edited)) <
        budget.similarity_threshold) {
      ++result.skipped;
      continue;
    }
    if (action.kind == TextActionKind::kInsert) {
      for (size_t i = action.position; i < current_index.size(); ++i) ++current_index[i];
    }
    result.tokens = std::move(edited);
    result.applied.push_back(action);
    if (PredictClass(model, {{}, result.tokens}) != label) {
      result.flipped = true;
      break;
    }
  }
  return result;
}

}  // namespace cleanmark
