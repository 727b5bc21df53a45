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

#ifndef WBT_TEACHER_TRAIN_HPP_
#define WBT_TEACHER_TRAIN_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbt/common.hpp"
#include "wbt/eval/policy.hpp"
#include "wbt/json_util.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/nn/checkpoint.hpp"
#include "wbt/nn/gaussian.hpp"
#include "wbt/sim/robot_model.hpp"
#include "wbt/teacher/env.hpp"
#include "wbt/teacher/obs.hpp"
#include "wbt/teacher/ppo.hpp"

namespace wbt::teacher {

struct TeacherConfig {
  std::uint64_t seed = 0;
  int iterations = 200;
  int n_envs = 64;
  int horizon = 32;
  std::vector<int> hidden = {256, 256};
  nn::Activation activation = nn::Activation::kElu;
  double init_log_std = -1.0;
  PpoHyper ppo;
  EnvConfig env = default_env();
  // Deterministic evaluation on the training clips every N iterations and
  // after the last one; 0 disables it.
  int eval_every = 0;
  int checkpoint_every = 0;  // 0: only the final checkpoint
  int jobs = 1;
  // Fault injection for tests: rewards of this iteration become NaN.
  int fault_iteration = -1;

  static EnvConfig default_env();  // asset-only randomization
  void validate() const;           // throws ConfigError
};

nlohmann::json to_json(const EnvConfig& c);
EnvConfig env_config_from_json(JsonReader r);
nlohmann::json to_json(const TeacherConfig& c);
// `seed` is mandatory.
TeacherConfig teacher_config_from_json(const nlohmann::json& j);

class TrainingDiverged : public NumericalDivergence {
 public:
  TrainingDiverged(const std::string& what, int last_good_iteration)
      : NumericalDivergence(what), last_good_(last_good_iteration) {}
  int last_good_iteration() const { return last_good_; }

 private:
  int last_good_;
};

// Deterministic policy mean for raw (unnormalized) observations, one column
// per sample.
Mat policy_mean(const ActorCritic& ac, const Mat& raw_obs);

// Evaluates an ActorCritic with its mean action.
class PpoPolicy : public eval::Policy {
 public:
  PpoPolicy(ActorCritic ac, double action_scale,
            std::unique_ptr<ObsBuilder> builder, std::string id = "teacher");
  std::string id() const override { return id_; }
  void reset() override;
  Vec act(const sim::SimState& state, const motion::MotionClip& clip,
          int frame, const eval::NoiseSpec& noise, Rng& rng) override;
  const ActorCritic& actor_critic() const { return ac_; }
  double action_scale() const { return action_scale_; }

 private:
  ActorCritic ac_;
  double action_scale_;
  std::unique_ptr<ObsBuilder> builder_;
  std::string id_;
  Vec prev_action_;
};

nn::Checkpoint to_checkpoint(const ActorCritic& ac, nlohmann::json meta);
ActorCritic actor_critic_from_checkpoint(const nn::Checkpoint& ckpt);

struct TrainOutput {
  ActorCritic ac;
  std::vector<nlohmann::json> log;  // one record per iteration
  nn::Checkpoint checkpoint;
  long env_steps = 0;
};

struct TrainIo {
  // When set: <dir>/<name>.json checkpoint and <dir>/<name>_log.jsonl.
  std::filesystem::path out_dir;
  std::string name = "teacher";
  nlohmann::json extra_meta = nlohmann::json::object();
};

// PPO over n_envs environments with RSI, early termination and the
// configured randomization. Observations come from clones of `obs_proto`.
// Deterministic for a fixed seed, independent of `jobs`. On divergence the
// last good parameters are written (when out_dir is set) and
// TrainingDiverged is thrown.
TrainOutput train_teacher(const sim::RobotModel& model,
                          const std::vector<motion::MotionClip>& clips,
                          const TeacherConfig& config,
                          const ObsBuilder& obs_proto,
                          const TrainIo& io = {});

// Oracle-observation teacher.
TrainOutput train_teacher(const sim::RobotModel& model,
                          const std::vector<motion::MotionClip>& clips,
                          const TeacherConfig& config, const TrainIo& io = {});

// Rebuilds the evaluation policy of an oracle-observation checkpoint.
std::unique_ptr<PpoPolicy> load_teacher_policy(const sim::RobotModel& model,
                                               const nn::Checkpoint& ckpt);

}  // namespace wbt::teacher

#endif  // WBT_TEACHER_TRAIN_HPP_
