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

#include "wbt/sim/kinematics.hpp"

namespace wbt::sim {

Points2 forward_kinematics(const RobotModel& model, const Vec2& root_pos,
                           double root_angle, const Vec& q) {
  if (q.size() != model.n_joints())
    throw InvalidInput("forward_kinematics: expected " +
                       std::to_string(model.n_joints()) + " joint angles, got " +
                       std::to_string(q.size()));
  if (!root_pos.allFinite() || !std::isfinite(root_angle) || !q.allFinite())
    throw InvalidInput("forward_kinematics: non-finite input");
  const auto poses = link_poses<double>(model, root_pos, root_angle, q);
  return keypoints_from_poses<double>(model, root_pos, poses);
}

bool is_ancestor(const RobotModel& model, int ancestor, int link) {
  for (int l = link; l >= 0; l = model.link_parents[l])
    if (l == ancestor) return true;
  return false;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> point_jacobian(
    const RobotModel& model, const Vec2& root_pos, const LinkPoses& poses,
    int link, const Vec2& point) {
  Eigen::Matrix<double, 2, Eigen::Dynamic> jac =
      Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, model.n_dofs());
  jac(0, 0) = 1.0;
  jac(1, 1) = 1.0;
  jac.col(2) = perp(point - root_pos);
  for (int l = link; l >= 0; l = model.link_parents[l])
    jac.col(3 + l) = perp(point - poses.proximal[l]);
  return jac;
}

Mat keypoint_jacobian(const RobotModel& model, const Vec2& root_pos,
                      double root_angle, const Vec& q) {
  const auto poses = link_poses<double>(model, root_pos, root_angle, q);
  Mat jac(2 * model.n_keypoints(), model.n_dofs());
  jac.topRows<2>() = point_jacobian(model, root_pos, poses, -1, root_pos);
  for (std::size_t k = 0; k < model.keypoint_links.size(); ++k) {
    const int link = model.keypoint_links[k];
    jac.middleRows(2 * (k + 1), 2) =
        point_jacobian(model, root_pos, poses, link, poses.distal[link]);
  }
  return jac;
}

}  // namespace wbt::sim
