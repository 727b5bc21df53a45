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

#include "wbt/student/deploy_obs.hpp"

namespace wbt::student {

Vec ProprioFrame::flat() const {
  Vec out(q.size() + qdot.size() + 3 + prev_action.size());
  out << q, qdot, angvel, gravity, prev_action;
  return out;
}

ProprioFrame proprio_frame(const eval::Observation& obs,
                           const Vec& prev_action) {
  ProprioFrame f;
  f.q = obs.state.q;
  f.qdot = obs.state.qdot;
  f.angvel = obs.state.root_angvel;
  f.gravity = obs.gravity;
  f.prev_action = prev_action;
  return f;
}

ProprioHistory::ProprioHistory(int length, int n_joints)
    : length_(length), n_joints_(n_joints) {
  if (length < 1) throw InvalidInput("history length must be >= 1");
}

void ProprioHistory::push(ProprioFrame frame) {
  if (frame.q.size() != n_joints_ || frame.qdot.size() != n_joints_ ||
      frame.prev_action.size() != n_joints_)
    throw InvalidInput("proprio frame: joint dimension mismatch");
  frames_.push_back(std::move(frame));
  while (static_cast<int>(frames_.size()) > length_) frames_.pop_front();
}

const ProprioFrame& ProprioHistory::newest() const {
  if (frames_.empty()) throw InvalidInput("proprio history is empty");
  return frames_.back();
}

Vec ProprioHistory::stacked() const {
  const int d = proprio_frame_dim(n_joints_);
  Vec out = Vec::Zero(static_cast<Eigen::Index>(length_) * d);
  const int pad = length_ - filled();
  for (int i = 0; i < filled(); ++i)
    out.segment(static_cast<Eigen::Index>(pad + i) * d, d) = frames_[i].flat();
  return out;
}

Vec DeployObs::flat() const {
  Vec out(history.size() + goal.size());
  out << history, goal;
  return out;
}

DeployObs build_deploy_obs(const ProprioHistory& history,
                           const motion::MotionClip& clip, int frame,
                           int window) {
  if (window < 1) throw InvalidInput("future window must be >= 1");
  if (frame < 0 || frame >= clip.size())
    throw InvalidInput("deploy observation: frame out of range");
  const auto& cur = history.newest();
  const double heading = eval::root_angle_from_gravity(cur.gravity);
  const Mat2 to_local = rot2(heading).transpose();
  const int k = static_cast<int>(clip.frames[0].keypoints.cols());
  const int gd = goal_frame_dim(k);
  DeployObs obs;
  obs.history = history.stacked();
  obs.goal.resize(static_cast<Eigen::Index>(window) * gd);
  for (int j = 0; j < window; ++j) {
    const auto& ref = clip.clamped(frame + 1 + j);
    auto g = obs.goal.segment(static_cast<Eigen::Index>(j) * gd, gd);
    g(0) = ref.root_pos(1);
    g(1) = wrap_angle(ref.root_angle - heading);
    g.segment<2>(2) = to_local * ref.root_linvel;
    g(4) = ref.root_angvel - cur.angvel;
    const Mat2 ref_local = rot2(ref.root_angle).transpose();
    for (int i = 1; i < k; ++i)
      g.segment<2>(5 + 2 * (i - 1)) =
          ref_local * (ref.keypoints.col(i) - ref.keypoints.col(0));
  }
  return obs;
}

DeployObsBuilder::DeployObsBuilder(int history, int window, int n_joints,
                                   int n_keypoints)
    : history_(history, n_joints),
      window_(window),
      n_joints_(n_joints),
      n_keypoints_(n_keypoints) {
  if (window < 1) throw InvalidInput("future window must be >= 1");
}

int DeployObsBuilder::history_dim() const {
  return history_.length() * proprio_frame_dim(n_joints_);
}

int DeployObsBuilder::goal_dim() const {
  return window_ * goal_frame_dim(n_keypoints_);
}

int DeployObsBuilder::dim() const { return history_dim() + goal_dim(); }

Vec DeployObsBuilder::build(const eval::Observation& obs,
                            const Vec& prev_action,
                            const motion::MotionClip& clip, int frame) {
  history_.push(proprio_frame(obs, prev_action));
  last_ = build_deploy_obs(history_, clip, frame, window_);
  return last_.flat();
}

std::unique_ptr<teacher::ObsBuilder> DeployObsBuilder::clone() const {
  return std::make_unique<DeployObsBuilder>(history_.length(), window_,
                                            n_joints_, n_keypoints_);
}

nlohmann::json DeployObsBuilder::describe() const {
  return {{"type", "deploy"},
          {"history", history_.length()},
          {"window", window_},
          {"n_joints", n_joints_},
          {"n_keypoints", n_keypoints_}};
}

}  // namespace wbt::student
