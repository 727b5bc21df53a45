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

#ifndef WBT_APP_PIPELINE_HPP_
#define WBT_APP_PIPELINE_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbt/app/run_config.hpp"
#include "wbt/motion/clip.hpp"

namespace wbt::app {

enum class Stage {
  kGenerate,
  kCurate,
  kRetarget,
  kTrainTeacher,
  kDistill,
  kEval,
  kAblate,
  kRobustness,
};

const char* to_string(Stage s);
Stage stage_from_string(const std::string& s);  // throws ConfigError
std::vector<Stage> all_stages();

struct Artifact {
  std::string path;  // relative to the output directory
  std::string stage;
  std::string config_hash;
  std::uint64_t seed = 0;
};

struct PipelineResult {
  std::vector<Artifact> artifacts;
  // Environment steps of training actually performed (0 when every model
  // came from the cache).
  long trained_env_steps = 0;
  int trained_models = 0;
  int cache_hits = 0;
  nlohmann::json manifest;
};

// Runs `stages` in pipeline order, reading upstream artifacts from
// config.out_dir and writing <out_dir>/manifest.json. A stage whose input is
// missing throws DependencyError naming the file and the stage producing it.
// Trained models are stored in config.cache_dir (when set) under a key
// derived from their configuration and inputs, and reused on later runs.
PipelineResult run_pipeline(const RunConfig& config,
                            const std::vector<Stage>& stages,
                            std::ostream* progress = nullptr);

// Clip sets as the pipeline writes them: <dir>/index.json lists clip files.
void save_clip_set(const std::vector<motion::MotionClip>& clips,
                   const std::filesystem::path& dir);
std::vector<motion::MotionClip> load_clip_set(const std::filesystem::path& dir);

}  // namespace wbt::app

#endif  // WBT_APP_PIPELINE_HPP_
