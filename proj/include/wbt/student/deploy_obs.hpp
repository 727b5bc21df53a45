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

#ifndef WBT_STUDENT_DEPLOY_OBS_HPP_
#define WBT_STUDENT_DEPLOY_OBS_HPP_

#include <deque>
#include <memory>

#include "wbt/common.hpp"
#include "wbt/eval/noise.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/teacher/obs.hpp"

namespace wbt::student {

// One proprioceptive sample: [q, qdot, root angular velocity, gravity (2),
// previous action].
struct ProprioFrame {
  Vec q;
  Vec qdot;
  double angvel = 0.0;
  Vec2 gravity = Vec2(0.0, -1.0);
  Vec prev_action;
  Vec flat() const;
};

inline int proprio_frame_dim(int n_joints) { return 3 * n_joints + 3; }
// [h, root angle difference, root velocity (2), angular velocity difference,
// keypoint offsets 2(K-1)]
inline int goal_frame_dim(int n_keypoints) { return 5 + 2 * (n_keypoints - 1); }

ProprioFrame proprio_frame(const eval::Observation& obs,
                           const Vec& prev_action);

// The last H frames, oldest first.
class ProprioHistory {
 public:
  ProprioHistory(int length, int n_joints);
  void clear() { frames_.clear(); }
  void push(ProprioFrame frame);
  int length() const { return length_; }
  int filled() const { return static_cast<int>(frames_.size()); }
  const ProprioFrame& newest() const;
  // H * frame_dim values; slots before the episode start are zero.
  Vec stacked() const;

 private:
  int length_;
  int n_joints_;
  std::deque<ProprioFrame> frames_;
};

struct DeployObs {
  Vec history;
  Vec goal;
  Vec flat() const;
};

// Goal for frames frame+1 .. frame+W (clamped to the last frame). Heading,
// root velocity and angular velocity terms use the newest history frame;
// the root velocity is rotated into the current root frame and keypoint
// offsets into the reference root frame. Throws InvalidInput on an empty
// history, W < 1 or a frame outside the clip.
DeployObs build_deploy_obs(const ProprioHistory& history,
                           const motion::MotionClip& clip, int frame,
                           int window);

// Observation builder for policies that act on deployable observations.
class DeployObsBuilder : public teacher::ObsBuilder {
 public:
  DeployObsBuilder(int history, int window, int n_joints, int n_keypoints);
  int dim() const override;
  void reset() override { history_.clear(); }
  Vec build(const eval::Observation& obs, const Vec& prev_action,
            const motion::MotionClip& clip, int frame) override;
  std::unique_ptr<teacher::ObsBuilder> clone() const override;
  nlohmann::json describe() const override;

  int history_dim() const;
  int goal_dim() const;
  // Splits of the most recent build() result.
  const DeployObs& last() const { return last_; }

 private:
  ProprioHistory history_;
  int window_;
  int n_joints_;
  int n_keypoints_;
  DeployObs last_;
};

}  // namespace wbt::student

#endif  // WBT_STUDENT_DEPLOY_OBS_HPP_
