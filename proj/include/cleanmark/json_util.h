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

#ifndef CLEANMARK_JSON_UTIL_H_
#define CLEANMARK_JSON_UTIL_H_

#include <json.hpp>

#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "cleanmark/errors.h"

namespace cleanmark {

// Validation failure at a JSON path such as "watermark.rates[0]".
class ConfigError : public InvalidArgumentError {
 public:
  ConfigError(std::string path, const std::string& message)
      : InvalidArgumentError(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Strict reader over one JSON object: typed required/optional fields with
// path-qualified errors, and rejection of keys that were never read.
class JsonReader {
 public:
  JsonReader(const nlohmann::json& object, std::string path)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(Where(), "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string Child(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  bool Has(std::string_view key) const {
    return object_.contains(std::string(key)) && !object_.at(std::string(key)).is_null();
  }

  template <typename T>
  T Required(std::string_view key) {
    seen_.insert(std::string(key));
    if (!Has(key)) throw ConfigError(Child(key), "required field is missing");
    return Convert<T>(object_.at(std::string(key)), Child(key));
  }

  template <typename T>
  T Optional(std::string_view key, T fallback) {
    seen_.insert(std::string(key));
    if (!Has(key)) return fallback;
    return Convert<T>(object_.at(std::string(key)), Child(key));
  }

  // Nested object (must exist).
  JsonReader Object(std::string_view key) {
    seen_.insert(std::string(key));
    if (!Has(key)) throw ConfigError(Child(key), "required field is missing");
    return JsonReader(object_.at(std::string(key)), Child(key));
  }

  const nlohmann::json& Raw(std::string_view key) {
    seen_.insert(std::string(key));
    if (!Has(key)) throw ConfigError(Child(key), "required field is missing");
    return object_.at(std::string(key));
  }

  // Throws if the object holds a key no accessor asked for.
  void RejectUnknown() const {
    for (const auto& item : object_.items()) {
      if (!seen_.contains(item.key())) {
        throw ConfigError(Child(item.key()), "unknown field");
      }
    }
  }

 private:
  std::string Where() const { return path_.empty() ? "<root>" : path_; }

  template <typename T>
  static T Convert(const nlohmann::json& value, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!value.is_boolean()) throw ConfigError(path, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!value.is_number_integer()) throw ConfigError(path, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (value.is_number_integer() && !value.is_number_unsigned() &&
            value.get<int64_t>() < 0) {
          throw ConfigError(path, "expected a non-negative integer");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!value.is_number()) throw ConfigError(path, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!value.is_string()) throw ConfigError(path, "expected a string");
    }
    try {
      return value.get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path, std::string("wrong type: ") + e.what());
    }
  }

  const nlohmann::json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace cleanmark

#endif  // CLEANMARK_JSON_UTIL_H_
