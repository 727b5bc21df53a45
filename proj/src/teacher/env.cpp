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

#include "wbt/teacher/env.hpp"

#include <cmath>

namespace wbt::teacher {

void EnvConfig::validate() const {
  try {
    randomization.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (!(action_scale > 0.0))
    throw ConfigError("env: action_scale must be > 0");
  reward.validate();
}

void check_clips(const sim::RobotModel& model,
                 const std::vector<motion::MotionClip>& clips) {
  if (clips.empty()) throw InvalidInput("clip set is empty");
  for (const auto& c : clips) {
    if (c.size() < 2)
      throw InvalidInput("clip '" + c.name + "' has fewer than 2 frames");
    if (c.n_joints() != model.n_joints())
      throw InvalidInput("clip '" + c.name + "' has " +
                         std::to_string(c.n_joints()) + " joints, robot has " +
                         std::to_string(model.n_joints()));
    if (std::abs(c.fps * sim::kControlDt - 1.0) > 1e-9)
      throw InvalidInput("clip '" + c.name + "' is sampled at " +
                         std::to_string(c.fps) + " fps; the control rate is " +
                         std::to_string(1.0 / sim::kControlDt) + " Hz");
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

TrackingEnv::TrackingEnv(const sim::RobotModel& model,
                         const std::vector<motion::MotionClip>& clips,
                         const EnvConfig& config, std::uint64_t seed)
    : nominal_(model), clips_(&clips), config_(config), rng_(seed) {
  config_.validate();
  check_clips(model, clips);
  episode_.model = nominal_;
}

void TrackingEnv::reset() {
  std::uniform_int_distribution<int> pick_clip(
      0, static_cast<int>(clips_->size()) - 1);
  const int c = pick_clip(rng_);
  int f = 0;
  if (config_.reference_state_init) {
    std::uniform_int_distribution<int> pick_frame(0, (*clips_)[c].size() - 2);
    f = pick_frame(rng_);
  }
  reset_to(c, f);
}

void TrackingEnv::reset_to(int clip_index, int frame) {
  if (clip_index < 0 || clip_index >= static_cast<int>(clips_->size()))
    throw InvalidInput("reset_to: clip index out of range");
  const auto& c = (*clips_)[clip_index];
  if (frame < 0 || frame + 1 >= c.size())
    throw InvalidInput("reset_to: frame out of range");
  clip_ = clip_index;
  frame_ = frame;
  const double remaining = (c.size() - 1 - frame) * sim::kControlDt;
  episode_ = sim::randomize(nominal_, config_.randomization, rng_, remaining);
  if (!config_.pushes) episode_.schedule.pushes.clear();
  state_ = sim::state_from_frame(c.frames[frame]);
  prev_action_ = Vec::Zero(nominal_.n_joints());
  time_ = 0.0;
  next_push_ = 0;
  episode_return_ = 0.0;
  episode_steps_ = 0;
}

Vec TrackingEnv::target_from_action(const Vec& action) const {
  return clip().clamped(frame_ + 1).q + config_.action_scale * action;
}

StepResult TrackingEnv::step(const Vec& action, double progress) {
  if (action.size() != nominal_.n_joints())
    throw InvalidInput("env step: action dimension mismatch");
  const auto& c = clip();
  const Vec target = target_from_action(action);
  const auto& model = episode_.model;
  const auto& schedule = episode_.schedule;

  sim::SimState s = state_;
  while (next_push_ < schedule.pushes.size() &&
         schedule.pushes[next_push_].time < time_ + sim::kControlDt) {
    s.root_linvel += schedule.pushes[next_push_].delta_linvel;
    ++next_push_;
  }
  const Vec torque = sim::pd_torque(model, s, target);
  StepResult r;
  try {
    if (schedule.torque_noise_std > 0.0) {
      const Vec offset =
          schedule.torque_noise_std * normal_vec(rng_, model.n_joints());
      s = sim::control_step(model, s, target, &offset);
    } else {
      s = sim::control_step(model, s, target);
    }
  } catch (const sim::SimulationDiverged&) {
    r.diverged = true;
  }
  if (r.diverged || !s.finite()) {
    r.diverged = true;
    r.done = true;
    r.reason = "diverged";
    ++episode_steps_;
    return r;
  }

  const auto& ref = c.frames[frame_ + 1];
  r.terms = compute_reward(model, s, action, prev_action_, torque, ref,
                           config_.reward, progress);
  r.reward = r.terms.total;
  state_ = s;
  prev_action_ = action;
  ++frame_;
  time_ += sim::kControlDt;
  ++episode_steps_;
  episode_return_ += r.reward;

  if (config_.early_termination) {
    r.termination = sim::check_termination(model, state_, ref.keypoints);
    if (r.termination != sim::Termination::kAlive) {
      r.done = true;
      r.reason = sim::to_string(r.termination);
      return r;
    }
  }
  if (frame_ + 1 >= c.size()) {
    r.done = true;
    r.truncated = true;
    r.reason = "end_of_clip";
  }
  return r;
}

}  // namespace wbt::teacher
