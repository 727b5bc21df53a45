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

#ifndef WBT_TEACHER_OBS_HPP_
#define WBT_TEACHER_OBS_HPP_

#include <memory>

#include <json.hpp>

#include "wbt/common.hpp"
#include "wbt/eval/noise.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/sim/robot_model.hpp"
#include "wbt/sim/simulator.hpp"

namespace wbt::teacher {

// Privileged observation. Every vector is expressed in the current root
// frame and every angle is relative, so a common rigid motion of robot and
// reference leaves it unchanged.
//
// proprio: keypoints 1.. relative to the root (2(K-1)), q (J), link angles
//          relative to the root (J), keypoint velocities (2K), qdot (J), root
//          angular velocity (1), previous action (J)
// goal:    keypoint differences (2K), joint differences (J), link angle
//          differences (J), keypoint velocity differences (2K), root angular
//          velocity difference (1), reference keypoints relative to the
//          current root (2K), root angle difference (1)
struct OracleObs {
  Vec proprio;
  Vec goal;
  Vec flat() const;
};

int oracle_proprio_dim(const sim::RobotModel& model);
int oracle_goal_dim(const sim::RobotModel& model);
inline int oracle_obs_dim(const sim::RobotModel& model) {
  return oracle_proprio_dim(model) + oracle_goal_dim(model);
}

// Observation against an explicit next reference frame.
OracleObs oracle_obs_against(const sim::RobotModel& model,
                             const sim::SimState& state,
                             const Vec& prev_action,
                             const motion::Frame& next_ref);

// Requires 0 <= frame and frame + 1 < clip.size(); throws InvalidInput
// otherwise.
OracleObs build_oracle_obs(const sim::RobotModel& model,
                           const sim::SimState& state, const Vec& prev_action,
                           const motion::MotionClip& clip, int frame);

// World-frame velocities of the tracked keypoints, one column each.
Points2 keypoint_velocities(const sim::RobotModel& model, const Vec2& root_pos,
                            double root_angle, const Vec& q,
                            const Vec2& root_linvel, double root_angvel,
                            const Vec& qdot);

// Per-episode observation constructor. Implementations may keep history;
// build() must be called exactly once per control step.
class ObsBuilder {
 public:
  virtual ~ObsBuilder() = default;
  virtual int dim() const = 0;
  virtual void reset() = 0;
  virtual Vec build(const eval::Observation& obs, const Vec& prev_action,
                    const motion::MotionClip& clip, int frame) = 0;
  virtual std::unique_ptr<ObsBuilder> clone() const = 0;
  // Recorded in checkpoints so a policy can be rebuilt.
  virtual nlohmann::json describe() const = 0;
};

// Oracle observation; at the final frame the goal holds the last pose.
class OracleObsBuilder : public ObsBuilder {
 public:
  explicit OracleObsBuilder(const sim::RobotModel& model) : model_(model) {}
  int dim() const override { return oracle_obs_dim(model_); }
  void reset() override {}
  Vec build(const eval::Observation& obs, const Vec& prev_action,
            const motion::MotionClip& clip, int frame) override;
  std::unique_ptr<ObsBuilder> clone() const override {
    return std::make_unique<OracleObsBuilder>(model_);
  }
  nlohmann::json describe() const override { return {{"type", "oracle"}}; }

 private:
  sim::RobotModel model_;
};

// Noise-free observation of a state.
eval::Observation exact_observation(const sim::SimState& state);

}  // namespace wbt::teacher

#endif  // WBT_TEACHER_OBS_HPP_
