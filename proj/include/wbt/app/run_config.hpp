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

#ifndef WBT_APP_RUN_CONFIG_HPP_
#define WBT_APP_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbt/eval/ablation.hpp"
#include "wbt/motion/curate.hpp"
#include "wbt/motion/generate.hpp"
#include "wbt/sim/robot_model.hpp"
#include "wbt/student/distill.hpp"
#include "wbt/teacher/train.hpp"

namespace wbt::app {

// One synthetic clip to generate.
struct ClipRecipe {
  std::string name;
  motion::ClipKind kind = motion::ClipKind::kSquat;
  motion::GeneratorParams params;
  double fps = 50.0;
  double duration = 4.0;  // s
};

struct RetargetStage {
  // Limb-group scales of the source skeleton (torso, thighs, shanks, feet).
  std::vector<double> scales = {1.0, 1.0, 1.0, 1.0};
  // When set, teacher and student train on the retargeted clips.
  bool use_for_training = false;
};

struct EvalStage {
  std::vector<std::uint64_t> seeds = {0};
  int noise_level = 0;
};

struct RobustnessStage {
  std::vector<int> levels = {0, 1, 2};
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  // Any of "teacher", "student", "dagger_mlp".
  std::vector<std::string> policies = {"student", "dagger_mlp"};
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path robot;  // empty: the built-in biped
  std::filesystem::path out_dir = "wbtrack_out";
  std::filesystem::path cache_dir;  // empty: no cache
  int jobs = 1;
  std::vector<ClipRecipe> clips;
  // Evaluated next to the training clips, never trained on.
  std::vector<ClipRecipe> held_out;
  motion::CurationPolicy curation;
  RetargetStage retarget;
  teacher::TeacherConfig teacher;
  student::StudentConfig student;
  EvalStage eval;
  eval::AblationGrid ablation;
  RobustnessStage robustness;

  void validate() const;  // throws ConfigError
};

// `seed` is mandatory. Stage seeds that are not given are derived from it.
// Relative paths resolve against `base_dir`; robot and cache paths must
// exist.
RunConfig run_config_from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& c);

// Hash of everything that affects results (not jobs, paths or cache).
std::string config_hash(const RunConfig& c);

sim::RobotModel load_robot_or_default(const std::filesystem::path& path);

nlohmann::json to_json(const ClipRecipe& r);
ClipRecipe clip_recipe_from_json(JsonReader r);

nlohmann::json to_json(const eval::AblationGrid& g);
// Missing fields keep the defaults of `base`.
eval::AblationGrid ablation_grid_from_json(JsonReader r,
                                           eval::AblationGrid base);

}  // namespace wbt::app

#endif  // WBT_APP_RUN_CONFIG_HPP_
