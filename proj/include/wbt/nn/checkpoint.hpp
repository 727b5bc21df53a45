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

#ifndef WBT_NN_CHECKPOINT_HPP_
#define WBT_NN_CHECKPOINT_HPP_

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "wbt/common.hpp"
#include "wbt/nn/mlp.hpp"

namespace wbt::nn {

// Named networks and vectors plus free-form metadata. Serialized as JSON
// with shortest round-trip doubles, so save/load is bit-exact.
struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  std::string kind;
  std::map<std::string, Mlp> networks;
  std::map<std::string, Vec> vectors;
  nlohmann::json meta = nlohmann::json::object();

  const Mlp& network(const std::string& name) const;
  const Vec& vector(const std::string& name) const;
};

nlohmann::json spec_to_json(const MlpSpec& spec);
MlpSpec spec_from_json(const nlohmann::json& j);

std::string checkpoint_to_string(const Checkpoint& ckpt);
// Throws InvalidInput on malformed text.
Checkpoint checkpoint_from_string(const std::string& text);
// Writes to a temporary sibling and renames, so readers never observe a
// partial file. Non-finite parameters are rejected.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
// Throws DependencyError when the file is missing.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace wbt::nn

#endif  // WBT_NN_CHECKPOINT_HPP_
