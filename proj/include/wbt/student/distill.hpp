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

#ifndef WBT_STUDENT_DISTILL_HPP_
#define WBT_STUDENT_DISTILL_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbt/common.hpp"
#include "wbt/eval/policy.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/nn/checkpoint.hpp"
#include "wbt/sim/robot_model.hpp"
#include "wbt/student/cvae.hpp"
#include "wbt/student/deploy_obs.hpp"
#include "wbt/teacher/train.hpp"

namespace wbt::student {

struct StudentConfig {
  std::uint64_t seed = 0;
  int iterations = 200;
  int n_envs = 32;
  int horizon = 32;
  // Architecture; wiring dimensions and seed are filled in by train_student.
  StudentSpec spec;
  double beta = 0.1;
  double lr = 1e-3;
  int epochs = 2;
  int minibatches = 4;
  double max_grad_norm = 1.0;
  // Updates use the samples of the last N iterations.
  int buffer_iterations = 4;
  // Asset and dynamics randomization; env.pushes switches pushes. The
  // action scale is taken from the teacher.
  teacher::EnvConfig env = default_env();
  int eval_every = 0;
  int checkpoint_every = 0;
  int jobs = 1;
  // Fault injection for tests: this iteration's gradient becomes NaN.
  int fault_iteration = -1;

  static teacher::EnvConfig default_env();
  void validate() const;  // throws ConfigError
};

nlohmann::json to_json(const StudentConfig& c);
// `seed` is mandatory.
StudentConfig student_config_from_json(const nlohmann::json& j);

// Fills the wiring dimensions of `spec` for a robot.
StudentSpec wire_spec(StudentSpec spec, const sim::RobotModel& model);

class StudentPolicy : public eval::Policy {
 public:
  StudentPolicy(StudentParams params, double action_scale,
                std::string id = "student");
  std::string id() const override { return id_; }
  void reset() override;
  Vec act(const sim::SimState& state, const motion::MotionClip& clip,
          int frame, const eval::NoiseSpec& noise, Rng& rng) override;
  const StudentParams& params() const { return params_; }

 private:
  StudentParams params_;
  double action_scale_;
  DeployObsBuilder builder_;
  std::string id_;
  Vec prev_action_;
};

nn::Checkpoint to_checkpoint(const StudentParams& params, nlohmann::json meta);
StudentParams student_from_checkpoint(const nn::Checkpoint& ckpt);

struct StudentTrainOutput {
  StudentParams params;
  std::vector<nlohmann::json> log;
  nn::Checkpoint checkpoint;
  long env_steps = 0;
};

// Online DAgger: the student acts (its deployment latent mode) in
// randomized environments, the frozen teacher's mean action labels every
// visited state, and the student descends the distillation loss on the
// recent samples. Deterministic for a fixed seed, independent of `jobs`.
// Divergence behaves as in train_teacher.
StudentTrainOutput train_student(const sim::RobotModel& model,
                                 const std::vector<motion::MotionClip>& clips,
                                 const nn::Checkpoint& teacher_ckpt,
                                 const StudentConfig& config,
                                 const teacher::TrainIo& io = {});

// Rebuilds an evaluation policy from any policy checkpoint: oracle or
// deploy-observation PPO policies and students.
std::unique_ptr<eval::Policy> load_policy(const sim::RobotModel& model,
                                          const nn::Checkpoint& ckpt);

}  // namespace wbt::student

#endif  // WBT_STUDENT_DISTILL_HPP_
