// Copyright 2026 The wbtrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WBT_JSON_UTIL_HPP_
#define WBT_JSON_UTIL_HPP_

#include <set>
#include <string>

#include <json.hpp>

#include "wbt/common.hpp"

namespace wbt {

// Schema-checked access to one JSON object. Errors are ConfigErrors naming
// the dotted key path; finish() rejects keys nobody asked for.
class JsonReader {
 public:
  JsonReader(const nlohmann::json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ConfigError(where() + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  // Leaves `out` unchanged when the key is absent.
  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  template <typename T>
  void require(const char* key, T& out) {
    if (!j_.contains(key)) throw ConfigError(where(key) + ": required");
    get(key, out);
  }

  // Reader for a nested object; an absent key reads as an empty object.
  JsonReader child(const char* key) {
    seen_.insert(key);
    static const nlohmann::json kEmpty = nlohmann::json::object();
    return JsonReader(j_.contains(key) ? j_.at(key) : kEmpty, where(key));
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key()))
        throw ConfigError(where(item.key().c_str()) + ": unknown key");
  }

  std::string where(const char* key = nullptr) const {
    std::string p = path_.empty() ? std::string("config") : path_;
    return key ? p + "." + key : p;
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Parses text, turning syntax errors into ConfigErrors with a byte offset.
inline nlohmann::json parse_json_config(const std::string& text,
                                        const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(source + ": parse error at byte " +
                      std::to_string(e.byte) + ": " + e.what());
  }
}

// Stable hash of a JSON value (keys are sorted by nlohmann::json).
inline std::string json_hash(const nlohmann::json& j) {
  return hex64(fnv1a(j.dump()));
}

}  // namespace wbt

#endif  // WBT_JSON_UTIL_HPP_
