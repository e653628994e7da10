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

#ifndef CLEANMARK_SERIALIZATION_H_
#define CLEANMARK_SERIALIZATION_H_

#include <json.hpp>

#include <string>

#include "cleanmark/arch.h"
#include "cleanmark/json_util.h"
#include "cleanmark/train.h"

namespace cleanmark {

nlohmann::json ArchToJson(const ArchSpec& arch);
// Strict: unknown keys and wrong types raise ConfigError at `path`.
ArchSpec ArchFromJson(const nlohmann::json& doc, const std::string& path);

nlohmann::json TrainConfigToJson(const TrainConfig& cfg);
TrainConfig TrainConfigFromJson(const nlohmann::json& doc, const std::string& path);

}  // namespace cleanmark

#endif  // CLEANMARK_SERIALIZATION_H_
