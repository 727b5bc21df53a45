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

#include "wbt/nn/checkpoint.hpp"

namespace wbt::nn {

using nlohmann::json;

namespace {

json vec_json(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vec vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

const Mlp& Checkpoint::network(const std::string& name) const {
  const auto it = networks.find(name);
  if (it == networks.end())
    throw InvalidInput("checkpoint '" + kind + "' has no network '" + name + "'");
  return it->second;
}

const Vec& Checkpoint::vector(const std::string& name) const {
  const auto it = vectors.find(name);
  if (it == vectors.end())
    throw InvalidInput("checkpoint '" + kind + "' has no vector '" + name + "'");
  return it->second;
}

json spec_to_json(const MlpSpec& s) {
  return {{"layer_sizes", s.layer_sizes},
          {"activation", to_string(s.activation)},
          {"init", to_string(s.init)},
          {"seed", s.seed},
          {"hidden_gain", s.hidden_gain},
          {"output_gain", s.output_gain}};
}

MlpSpec spec_from_json(const json& j) {
  MlpSpec s;
  s.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
  s.activation = activation_from_string(j.at("activation").get<std::string>());
  s.init = init_from_string(j.at("init").get<std::string>());
  s.seed = j.at("seed").get<std::uint64_t>();
  s.hidden_gain = j.value("hidden_gain", s.hidden_gain);
  s.output_gain = j.value("output_gain", s.output_gain);
  s.validate();
  return s;
}

std::string checkpoint_to_string(const Checkpoint& c) {
  json j;
  j["format"] = "wbtrack-checkpoint";
  j["format_version"] = Checkpoint::kFormatVersion;
  j["kind"] = c.kind;
  j["meta"] = c.meta;
  json nets = json::object();
  for (const auto& [name, net] : c.networks) {
    if (!net.params.allFinite())
      throw NumericalDivergence("checkpoint: network '" + name +
                                "' has non-finite parameters");
    nets[name] = {{"spec", spec_to_json(net.spec)}, {"params", vec_json(net.params)}};
  }
  j["networks"] = std::move(nets);
  json vecs = json::object();
  for (const auto& [name, v] : c.vectors) {
    if (!v.allFinite())
      throw NumericalDivergence("checkpoint: vector '" + name + "' is non-finite");
    vecs[name] = vec_json(v);
  }
  j["vectors"] = std::move(vecs);
  return j.dump(1);
}

Checkpoint checkpoint_from_string(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "wbtrack-checkpoint")
      throw InvalidInput("not a checkpoint file");
    if (j.at("format_version").get<int>() != Checkpoint::kFormatVersion)
      throw InvalidInput("unsupported checkpoint format_version");
    Checkpoint c;
    c.kind = j.at("kind").get<std::string>();
    c.meta = j.value("meta", json::object());
    for (const auto& [name, n] : j.at("networks").items()) {
      Mlp net{spec_from_json(n.at("spec")), vec_from(n.at("params"))};
      if (net.params.size() != net.spec.n_params())
        throw InvalidInput("checkpoint: network '" + name +
                           "' parameter count disagrees with its spec");
      c.networks.emplace(name, std::move(net));
    }
    for (const auto& [name, v] : j.at("vectors").items())
      c.vectors.emplace(name, vec_from(v));
    return c;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const std::string text = checkpoint_to_string(ckpt);
  auto tmp = path;
  tmp += ".tmp";
  write_text_file(tmp, text);
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw DependencyError("checkpoint not found: " + path.string());
  return checkpoint_from_string(read_text_file(path));
}

}  // namespace wbt::nn
