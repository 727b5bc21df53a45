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

#ifndef WBT_TEACHER_ENV_HPP_
#define WBT_TEACHER_ENV_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "wbt/common.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/sim/randomization.hpp"
#include "wbt/sim/robot_model.hpp"
#include "wbt/sim/simulator.hpp"
#include "wbt/teacher/reward.hpp"

namespace wbt::teacher {

struct EnvConfig {
  sim::RandomizationSpec randomization;
  // Drop the push schedule even when dynamics randomization is on.
  bool pushes = true;
  bool reference_state_init = true;
  bool early_termination = true;
  // PD target = next reference pose + action_scale * action.
  double action_scale = 0.25;
  RewardWeights reward;

  void validate() const;  // throws ConfigError
};

struct StepResult {
  double reward = 0.0;
  RewardBreakdown terms;
  bool done = false;
  bool truncated = false;  // reached the final frame
  bool diverged = false;
  sim::Termination termination = sim::Termination::kAlive;
  // "" while alive, else "end_of_clip", "diverged" or a termination name.
  std::string reason;
};

// Throws InvalidInput unless every clip has >= 2 frames, matches the robot's
// joint count and is sampled at the control rate.
void check_clips(const sim::RobotModel& model,
                 const std::vector<motion::MotionClip>& clips);

// One simulated episode stream over a clip set. The clip vector must outlive
// the environment. Each instance owns its rng, so a batch of environments
// steps identically regardless of thread assignment.
class TrackingEnv {
 public:
  TrackingEnv(const sim::RobotModel& model,
              const std::vector<motion::MotionClip>& clips,
              const EnvConfig& config, std::uint64_t seed);

  // Samples a clip, a start frame (RSI) and this episode's randomized model.
  void reset();
  // Starts on a given clip and frame instead of sampling them.
  void reset_to(int clip_index, int frame);

  Vec target_from_action(const Vec& action) const;
  StepResult step(const Vec& action, double progress);

  const sim::SimState& state() const { return state_; }
  const motion::MotionClip& clip() const { return (*clips_)[clip_]; }
  int clip_index() const { return clip_; }
  int frame() const { return frame_; }
  const Vec& prev_action() const { return prev_action_; }
  const sim::RobotModel& episode_model() const { return episode_.model; }
  const sim::RobotModel& nominal_model() const { return nominal_; }
  double episode_return() const { return episode_return_; }
  int episode_steps() const { return episode_steps_; }
  Rng& rng() { return rng_; }

 private:
  sim::RobotModel nominal_;
  const std::vector<motion::MotionClip>* clips_;
  EnvConfig config_;
  Rng rng_;
  sim::RandomizedModel episode_;
  sim::SimState state_;
  Vec prev_action_;
  int clip_ = 0;
  int frame_ = 0;
  double time_ = 0.0;
  std::size_t next_push_ = 0;
  double episode_return_ = 0.0;
  int episode_steps_ = 0;
};

// Independent per-environment seed derived from a run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace wbt::teacher

#endif  // WBT_TEACHER_ENV_HPP_
