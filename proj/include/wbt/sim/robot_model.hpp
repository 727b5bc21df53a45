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

#ifndef WBT_SIM_ROBOT_MODEL_HPP_
#define WBT_SIM_ROBOT_MODEL_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "wbt/common.hpp"

namespace wbt::sim {

// Planar floating-base articulated robot. The root body (pelvis) sits at
// root_pos; every link is a rigid rod driven by one revolute joint at its
// proximal end. A link attaches to the distal endpoint of its parent link, or
// to root_pos when its parent is -1.
//
// World frame is (x forward, z up). A link with absolute angle phi points
// along (cos phi, sin phi); its absolute angle is
//   parent_angle + rest_angle + q,
// with the root angle standing in for the parent of top-level links.
struct RobotModel {
  static constexpr int kFormatVersion = 1;

  std::vector<std::string> link_names;
  std::vector<int> link_parents;
  std::vector<double> link_rest_angles;  // rad
  std::vector<double> link_lengths;      // m
  std::vector<double> link_masses;       // kg
  std::vector<double> link_coms;         // m, along the link from its joint
  // Rotational inertia about the COM; empty means uniform rod m*L^2/12.
  std::vector<double> link_inertias;

  double root_mass = 8.0;
  double root_inertia = 0.08;

  std::vector<Vec2> joint_limits;  // (lo, hi) rad
  std::vector<double> torque_limits;
  std::vector<double> pd_kp;
  std::vector<double> pd_kd;
  std::vector<double> armature;  // reflected rotor inertia per joint

  double contact_stiffness = 3.0e4;  // N/m
  double contact_damping = 1.0e3;    // N*s/m
  double friction_coeff = 1.0;
  // Slope of the regularized Coulomb law below the mu*N cap.
  double friction_viscous = 5.0e3;  // N*s/m

  double gravity = 9.81;
  bool fixed_base = false;

  std::vector<int> keypoint_links;
  std::vector<int> foot_links;

  int n_joints() const { return static_cast<int>(link_lengths.size()); }
  int n_links() const { return n_joints(); }
  // Keypoint 0 is the root; keypoint k > 0 is the distal endpoint of
  // keypoint_links[k - 1].
  int n_keypoints() const {
    return static_cast<int>(keypoint_links.size()) + 1;
  }
  // Generalized coordinates: (x, z, root_angle, q...).
  int n_dofs() const { return n_joints() + 3; }

  double link_inertia(int i) const;
  double total_mass() const;
  Vec joint_lo() const;
  Vec joint_hi() const;
  Vec clamp_to_limits(const Vec& q) const;

  // Throws InvalidInput naming the first violated invariant.
  void validate() const;
};

// Seven-joint biped: torso pivot, hips, knees, ankles. About 1.2 m tall
// standing, 36 kg.
RobotModel default_biped();

// Serial chain rooted at the base, rest angles zero. Handy for kinematics and
// physics tests.
RobotModel chain_model(const std::vector<double>& lengths,
                       const std::vector<double>& masses);

std::string to_json_string(const RobotModel& model);
RobotModel robot_from_json_string(const std::string& text);
void save_robot(const RobotModel& model, const std::filesystem::path& path);
RobotModel load_robot(const std::filesystem::path& path);

}  // namespace wbt::sim

#endif  // WBT_SIM_ROBOT_MODEL_HPP_
