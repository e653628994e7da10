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

#ifndef CLEANMARK_HASH_H_
#define CLEANMARK_HASH_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cleanmark {

// Lowercase hex SHA-256 digest.
std::string Sha256Hex(std::span<const uint8_t> bytes);
std::string Sha256Hex(std::string_view text);
std::string Sha256HexOfFile(const std::filesystem::path& path);

std::string Base64Encode(std::span<const uint8_t> bytes);
// Throws FormatError on malformed input.
std::vector<uint8_t> Base64Decode(std::string_view text);

}  // namespace cleanmark

#endif  // CLEANMARK_HASH_H_
