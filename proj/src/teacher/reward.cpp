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

#include "wbt/teacher/reward.hpp"

#include <algorithm>

#include "wbt/sim/kinematics.hpp"

namespace wbt::teacher {

double Curriculum::multiplier(double progress) const {
  if (ramp_end <= 0.0) return 1.0;
  return std::clamp(progress / ramp_end, 0.0, 1.0);
}

void RewardWeights::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("reward weights: ") + what);
  };
  require(w_kp >= 0 && w_jpos >= 0 && w_jvel >= 0 && w_linvel >= 0,
          "task weights must be >= 0");
  require(sigma_kp > 0 && sigma_jpos > 0 && sigma_jvel > 0 && sigma_linvel > 0,
          "kernel scales must be > 0");
  require(w_action_rate >= 0 && w_torque >= 0 && w_slip >= 0,
          "penalty weights must be >= 0");
  require(curriculum.ramp_end >= 0 && curriculum.ramp_end <= 1,
          "curriculum ramp_end must lie in [0, 1]");
}

namespace {

double kernel(double sq_err, double sigma) {
  return std::exp(-sq_err / (sigma * sigma));
}

bool is_foot_point(const sim::RobotModel& model, int link) {
  for (int f : model.foot_links)
    if (link == f || link == model.link_parents[f]) return true;
  return false;
}

}  // namespace

RewardBreakdown compute_reward(const sim::RobotModel& model,
                               const sim::SimState& after, const Vec& action,
                               const Vec& prev_action, const Vec& torque,
                               const motion::Frame& ref,
                               const RewardWeights& weights, double progress) {
  const Points2 kp = sim::forward_kinematics(model, after.root_pos,
                                             after.root_angle, after.q);
  const double kp_err = (kp - ref.keypoints).colwise().squaredNorm().mean();
  RewardBreakdown r;
  r.kp = weights.w_kp * kernel(kp_err, weights.sigma_kp);
  r.jpos = weights.w_jpos *
           kernel((after.q - ref.q).squaredNorm(), weights.sigma_jpos);
  r.jvel = weights.w_jvel *
           kernel((after.qdot - ref.qdot).squaredNorm(), weights.sigma_jvel);
  r.linvel = weights.w_linvel *
             kernel((after.root_linvel - ref.root_linvel).squaredNorm(),
                    weights.sigma_linvel);

  double slip = 0.0;
  for (const auto& c : sim::contact_points(model, after))
    if (c.active && is_foot_point(model, c.link)) slip += c.velocity.norm();

  r.multiplier = weights.curriculum.multiplier(progress);
  r.action_rate =
      -r.multiplier * weights.w_action_rate * (action - prev_action).norm();
  r.torque = -r.multiplier * weights.w_torque * torque.cwiseAbs().sum();
  r.slip = -r.multiplier * weights.w_slip * slip;
  r.total = r.kp + r.jpos + r.jvel + r.linvel + r.action_rate + r.torque +
            r.slip;
  return r;
}

}  // namespace wbt::teacher
