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

#ifndef WBT_SIM_KINEMATICS_HPP_
#define WBT_SIM_KINEMATICS_HPP_

#include <vector>

#include "wbt/common.hpp"
#include "wbt/sim/robot_model.hpp"

namespace wbt::sim {

template <typename Scalar>
using Vec2T = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using VecT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Points2T = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;

template <typename Scalar>
struct LinkPosesT {
  std::vector<Vec2T<Scalar>> proximal;
  std::vector<Vec2T<Scalar>> distal;
  std::vector<Vec2T<Scalar>> com;
  std::vector<Scalar> angle;  // absolute
};

using LinkPoses = LinkPosesT<double>;

template <typename Scalar, typename QDerived>
LinkPosesT<Scalar> link_poses(const RobotModel& model,
                              const Vec2T<Scalar>& root_pos, Scalar root_angle,
                              const Eigen::MatrixBase<QDerived>& q) {
  const int n = model.n_links();
  LinkPosesT<Scalar> out;
  out.proximal.resize(n);
  out.distal.resize(n);
  out.com.resize(n);
  out.angle.resize(n);
  for (int i = 0; i < n; ++i) {
    const int p = model.link_parents[i];
    const Scalar parent_angle = p < 0 ? root_angle : out.angle[p];
    const Vec2T<Scalar> base = p < 0 ? root_pos : out.distal[p];
    const Scalar a = parent_angle + Scalar(model.link_rest_angles[i]) + q(i);
    using std::cos;
    using std::sin;
    const Vec2T<Scalar> dir(cos(a), sin(a));
    out.angle[i] = a;
    out.proximal[i] = base;
    out.distal[i] = base + Scalar(model.link_lengths[i]) * dir;
    out.com[i] = base + Scalar(model.link_coms[i]) * dir;
  }
  return out;
}

template <typename Scalar>
Points2T<Scalar> keypoints_from_poses(const RobotModel& model,
                                      const Vec2T<Scalar>& root_pos,
                                      const LinkPosesT<Scalar>& poses) {
  Points2T<Scalar> kp(2, model.n_keypoints());
  kp.col(0) = root_pos;
  for (std::size_t k = 0; k < model.keypoint_links.size(); ++k)
    kp.col(static_cast<Eigen::Index>(k) + 1) =
        poses.distal[model.keypoint_links[k]];
  return kp;
}

// Tracked keypoint positions, one column per keypoint; column 0 is the root.
// Throws InvalidInput on wrong sizes or non-finite input.
Points2 forward_kinematics(const RobotModel& model, const Vec2& root_pos,
                           double root_angle, const Vec& q);

// d(point)/d(generalized coordinates) for a world point rigidly attached to
// `link` (-1 for the root body). Columns follow (x, z, root_angle, q...).
Eigen::Matrix<double, 2, Eigen::Dynamic> point_jacobian(
    const RobotModel& model, const Vec2& root_pos, const LinkPoses& poses,
    int link, const Vec2& point);

// Stacked keypoint Jacobian, rows (x0, z0, x1, z1, ...).
Mat keypoint_jacobian(const RobotModel& model, const Vec2& root_pos,
                      double root_angle, const Vec& q);

// True when `ancestor` is `link` or lies on its path to the root.
bool is_ancestor(const RobotModel& model, int ancestor, int link);

}  // namespace wbt::sim

#endif  // WBT_SIM_KINEMATICS_HPP_
