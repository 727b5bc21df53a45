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

#ifndef WBT_EVAL_ABLATION_HPP_
#define WBT_EVAL_ABLATION_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbt/common.hpp"
#include "wbt/eval/metrics.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/nn/checkpoint.hpp"
#include "wbt/sim/robot_model.hpp"
#include "wbt/student/distill.hpp"
#include "wbt/teacher/train.hpp"

namespace wbt::eval {

// Content hashes used as cache keys. Config hashes leave out `jobs`, which
// never changes results.
std::string clips_hash(const std::vector<motion::MotionClip>& clips);
std::string checkpoint_hash(const nn::Checkpoint& ckpt);
std::string config_hash(const student::StudentConfig& c);
std::string config_hash(const teacher::TeacherConfig& c);

// Checkpoint cache on disk. An empty directory disables caching.
class CheckpointCache {
 public:
  CheckpointCache() = default;
  explicit CheckpointCache(std::filesystem::path dir) : dir_(std::move(dir)) {}
  bool enabled() const { return !dir_.empty(); }
  std::filesystem::path path(const std::string& key) const;
  // Loads <dir>/<key>.json when present, otherwise calls `train` and stores
  // the result. `hit` reports which happened.
  nn::Checkpoint get_or_train(const std::string& key,
                              const std::function<nn::Checkpoint()>& train,
                              bool* hit = nullptr) const;

 private:
  std::filesystem::path dir_;
};

// Student distilled from `teacher`; the key covers config, teacher and clips.
nn::Checkpoint distill_cached(const sim::RobotModel& model,
                              const std::vector<motion::MotionClip>& clips,
                              const nn::Checkpoint& teacher,
                              const student::StudentConfig& config,
                              const CheckpointCache& cache,
                              bool* hit = nullptr);

// PPO policy on deployable observations (history and window from `spec`),
// trained without a teacher.
nn::Checkpoint scratch_cached(const sim::RobotModel& model,
                              const std::vector<motion::MotionClip>& clips,
                              const teacher::TeacherConfig& config,
                              const student::StudentSpec& spec,
                              const CheckpointCache& cache,
                              bool* hit = nullptr);

// One axis varies per section; every other setting stays at `base`.
struct AblationGrid {
  student::StudentConfig base;
  // From-scratch baseline of section (a).
  teacher::TeacherConfig scratch;
  bool baselines = true;
  std::vector<bool> explicit_ref = {true, false};
  std::vector<bool> kl_residual = {false, true};
  std::vector<double> kl_coef = {1.0, 0.1, 0.01, 0.001};
  std::vector<int> window = {1, 5, 10, 20};
  std::vector<int> latent_dim = {32, 64, 128, 256};
  std::vector<student::LatentMode> latent_mode = {
      student::LatentMode::kStochastic, student::LatentMode::kDeterministic};
  // Training seeds per cell; each replaces base.seed (and scratch.seed).
  std::vector<std::uint64_t> seeds = {0};
  // Evaluation rollouts per trained policy.
  std::vector<std::uint64_t> eval_seeds = {0};

  // Sets every axis to empty and disables the baselines.
  static AblationGrid single_cell(const student::StudentConfig& base);
};

enum class CellKind { kStudent, kScratch };

struct AblationCell {
  std::string section;  // e.g. "(d) Ablation with KL Coefficient"
  std::string method;   // e.g. "KL Coef = 0.1"
  CellKind kind = CellKind::kStudent;
  student::StudentConfig student;
  teacher::TeacherConfig scratch;
};

std::vector<AblationCell> expand_grid(const AblationGrid& grid);

struct AblationRow {
  std::string section;
  std::string method;
  bool ok = false;
  std::string error;
  std::string config_hash;
  // Per-clip rows over every training seed and evaluation seed.
  std::vector<TrackingRow> rows;
  int cache_hits = 0;
  Aggregate summary() const { return aggregate(rows); }
};

struct AblationTable {
  std::vector<AblationRow> rows;
};

struct AblationOptions {
  CheckpointCache cache;
  NoiseSpec noise;
  // Progress sink for each finished cell; may be empty.
  std::function<void(const AblationRow&)> on_cell;
};

// Trains (or loads) every cell, then evaluates it on `eval_clips`. A cell
// that throws is recorded as failed and the grid continues.
AblationTable run_ablation(const sim::RobotModel& model,
                           const std::vector<motion::MotionClip>& train_clips,
                           const std::vector<motion::MotionClip>& eval_clips,
                           const nn::Checkpoint& teacher,
                           const AblationGrid& grid,
                           const AblationOptions& options = {});

// Plain-text table: one block per section, SR, MPKPE, Vel-Dist and
// Acc-Dist over all rows, then MPKPE, Vel-Dist and Acc-Dist over the
// successful rows.
std::string format_ablation(const AblationTable& table);

// Header, then one record per (cell, clip row); failed cells get a single
// record without metrics.
std::string ablation_to_jsonl(const AblationTable& table);
AblationTable ablation_from_jsonl(const std::string& text);

}  // namespace wbt::eval

#endif  // WBT_EVAL_ABLATION_HPP_
