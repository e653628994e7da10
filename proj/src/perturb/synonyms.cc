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

#include <sstream>
#include <unordered_map>

#include "cleanmark/blob_io.h"
#include "cleanmark/errors.h"
#include "cleanmark/perturb.h"

namespace cleanmark {
namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

SynonymTable LoadSynonymTable(const std::filesystem::path& path,
                              std::span<const std::string> vocabulary) {
  std::unordered_map<std::string, uint32_t> ids;
  for (uint32_t i = 0; i < vocabulary.size(); ++i) ids.emplace(vocabulary[i], i);
  auto resolve = [&](const std::string& word, size_t line_no) {
    auto it = ids.find(word);
    if (it == ids.end()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": word '" + word + "' is not in the vocabulary");
    }
    return it->second;
  };
  SynonymTable table;
  std::istringstream in(ReadFileText(path));
  size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = Trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto split = line.find_first_of(" \t");
    if (split == std::string::npos) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) +
                        ": expected '<token> <syn1,syn2,...>'");
    }
    const uint32_t key = resolve(line.substr(0, split), line_no);
    std::istringstream rest(Trim(line.substr(split)));
    auto& candidates = table[key];
    for (std::string word; std::getline(rest, word, ',');) {
      word = Trim(word);
      if (!word.empty()) candidates.push_back(resolve(word, line_no));
    }
  }
  return table;
}

void SaveSynonymTable(const SynonymTable& table, const std::filesystem::path& path,
                      std::span<const std::string> vocabulary) {
  std::string text;
  for (const auto& [word, candidates] : table) {
    text += vocabulary[word] + "\t";
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (i > 0) text += ",";
      text += vocabulary[candidates[i]];
    }
    text += "\n";
  }
  WriteFileText(path, text);
}

}  // namespace cleanmark
