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

#ifndef WBT_TEACHER_REWARD_HPP_
#define WBT_TEACHER_REWARD_HPP_

#include "wbt/common.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/sim/robot_model.hpp"
#include "wbt/sim/simulator.hpp"

namespace wbt::teacher {

// Multiplier on the penalty terms: min(1, progress / ramp_end). ramp_end = 0
// applies the full penalties from the start.
struct Curriculum {
  double ramp_end = 0.5;
  double multiplier(double progress) const;
};

struct RewardWeights {
  double w_kp = 1.0;
  double w_jpos = 0.8;
  double w_jvel = 0.2;
  double w_linvel = 0.5;
  double sigma_kp = 0.3;      // m
  double sigma_jpos = 0.5;    // rad
  double sigma_jvel = 3.0;    // rad/s
  double sigma_linvel = 1.0;  // m/s
  double w_action_rate = 0.1;
  double w_torque = 1e-4;
  double w_slip = 0.3;
  Curriculum curriculum;

  double task_sum() const { return w_kp + w_jpos + w_jvel + w_linvel; }
  // Throws ConfigError.
  void validate() const;
};

// Weighted terms; penalties are stored with their sign and multiplier
// applied, so total is the plain sum of the seven terms.
struct RewardBreakdown {
  double kp = 0.0;
  double jpos = 0.0;
  double jvel = 0.0;
  double linvel = 0.0;
  double action_rate = 0.0;
  double torque = 0.0;
  double slip = 0.0;
  double multiplier = 0.0;
  double total = 0.0;
};

// Keypoint error is the mean squared keypoint distance; joint position,
// joint velocity and root velocity errors are squared Euclidean norms.
// `torque` is the applied joint torque and slip sums the speed of foot
// contact points (ankle and toe of each foot link) that are in contact after
// the step.
RewardBreakdown compute_reward(const sim::RobotModel& model,
                               const sim::SimState& after, const Vec& action,
                               const Vec& prev_action, const Vec& torque,
                               const motion::Frame& ref,
                               const RewardWeights& weights, double progress);

}  // namespace wbt::teacher

#endif  // WBT_TEACHER_REWARD_HPP_
