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

#include "wbt/teacher/obs.hpp"

#include "wbt/sim/kinematics.hpp"

namespace wbt::teacher {

namespace {

void put(Vec& out, int& at, const Eigen::Ref<const Vec>& v) {
  out.segment(at, v.size()) = v;
  at += static_cast<int>(v.size());
}

Vec flatten(const Points2& p) {
  return Eigen::Map<const Vec>(p.data(), p.size());
}

std::vector<double> link_angles(const sim::RobotModel& model,
                                const Vec2& root_pos, double root_angle,
                                const Vec& q) {
  return sim::link_poses<double>(model, root_pos, root_angle, q).angle;
}

}  // namespace

Vec OracleObs::flat() const {
  Vec out(proprio.size() + goal.size());
  out << proprio, goal;
  return out;
}

int oracle_proprio_dim(const sim::RobotModel& model) {
  const int k = model.n_keypoints();
  const int j = model.n_joints();
  return 2 * (k - 1) + j + j + 2 * k + j + 1 + j;
}

int oracle_goal_dim(const sim::RobotModel& model) {
  const int k = model.n_keypoints();
  const int j = model.n_joints();
  return 2 * k + j + j + 2 * k + 1 + 2 * k + 1;
}

Points2 keypoint_velocities(const sim::RobotModel& model, const Vec2& root_pos,
                            double root_angle, const Vec& q,
                            const Vec2& root_linvel, double root_angvel,
                            const Vec& qdot) {
  const Mat jac = sim::keypoint_jacobian(model, root_pos, root_angle, q);
  Vec gv(model.n_dofs());
  gv << root_linvel, root_angvel, qdot;
  const Vec v = jac * gv;
  return Eigen::Map<const Points2>(v.data(), 2, model.n_keypoints());
}

OracleObs oracle_obs_against(const sim::RobotModel& model,
                             const sim::SimState& state,
                             const Vec& prev_action,
                             const motion::Frame& next_ref) {
  const int nj = model.n_joints();
  if (state.q.size() != nj || state.qdot.size() != nj ||
      prev_action.size() != nj || next_ref.q.size() != nj)
    throw InvalidInput("oracle observation: joint dimension mismatch");
  const Mat2 world_to_local = rot2(state.root_angle).transpose();

  const Points2 kp = sim::forward_kinematics(model, state.root_pos,
                                             state.root_angle, state.q);
  const Points2 kv = keypoint_velocities(
      model, state.root_pos, state.root_angle, state.q, state.root_linvel,
      state.root_angvel, state.qdot);
  const Points2 ref_kv = keypoint_velocities(
      model, next_ref.root_pos, next_ref.root_angle, next_ref.q,
      next_ref.root_linvel, next_ref.root_angvel, next_ref.qdot);
  const auto angles =
      link_angles(model, state.root_pos, state.root_angle, state.q);
  const auto ref_angles = link_angles(model, next_ref.root_pos,
                                      next_ref.root_angle, next_ref.q);

  const int k = model.n_keypoints();
  Points2 rel = world_to_local * (kp.colwise() - state.root_pos);
  Vec rel_angles(nj), dangles(nj);
  for (int i = 0; i < nj; ++i) {
    rel_angles(i) = wrap_angle(angles[i] - state.root_angle);
    dangles(i) = wrap_angle(ref_angles[i] - angles[i]);
  }

  OracleObs obs;
  obs.proprio.resize(oracle_proprio_dim(model));
  int at = 0;
  put(obs.proprio, at, flatten(rel.rightCols(k - 1)));
  put(obs.proprio, at, state.q);
  put(obs.proprio, at, rel_angles);
  put(obs.proprio, at, flatten(world_to_local * kv));
  put(obs.proprio, at, state.qdot);
  put(obs.proprio, at, Vec::Constant(1, state.root_angvel));
  put(obs.proprio, at, prev_action);

  obs.goal.resize(oracle_goal_dim(model));
  at = 0;
  put(obs.goal, at, flatten(world_to_local * (next_ref.keypoints - kp)));
  put(obs.goal, at, next_ref.q - state.q);
  put(obs.goal, at, dangles);
  put(obs.goal, at, flatten(world_to_local * (ref_kv - kv)));
  put(obs.goal, at,
      Vec::Constant(1, next_ref.root_angvel - state.root_angvel));
  put(obs.goal, at,
      flatten(world_to_local *
              (next_ref.keypoints.colwise() - state.root_pos)));
  put(obs.goal, at,
      Vec::Constant(1, wrap_angle(next_ref.root_angle - state.root_angle)));
  return obs;
}

OracleObs build_oracle_obs(const sim::RobotModel& model,
                           const sim::SimState& state, const Vec& prev_action,
                           const motion::MotionClip& clip, int frame) {
  if (frame < 0 || frame + 1 >= clip.size())
    throw InvalidInput("oracle observation: frame " + std::to_string(frame) +
                       " needs a successor in clip '" + clip.name + "' of " +
                       std::to_string(clip.size()) + " frames");
  return oracle_obs_against(model, state, prev_action, clip.frames[frame + 1]);
}

Vec OracleObsBuilder::build(const eval::Observation& obs,
                            const Vec& prev_action,
                            const motion::MotionClip& clip, int frame) {
  if (frame < 0 || frame >= clip.size())
    throw InvalidInput("oracle observation: frame out of range");
  return oracle_obs_against(model_, obs.state, prev_action,
                            clip.clamped(frame + 1))
      .flat();
}

eval::Observation exact_observation(const sim::SimState& state) {
  eval::Observation obs;
  obs.state = state;
  obs.gravity = eval::gravity_in_root(state.root_angle);
  return obs;
}

}  // namespace wbt::teacher
