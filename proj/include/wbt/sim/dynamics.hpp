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

#ifndef WBT_SIM_DYNAMICS_HPP_
#define WBT_SIM_DYNAMICS_HPP_

#include "wbt/common.hpp"
#include "wbt/sim/kinematics.hpp"
#include "wbt/sim/robot_model.hpp"

// Rigid-body dynamics of the planar tree in absolute (world) coordinates.
//
// Planar spatial vectors are 3-vectors (angular, x, z). Motion vectors give
// the angular velocity and the velocity of the body-fixed point currently at
// the world origin; force vectors give the moment about the origin and the
// linear force. Generalized coordinates are (x, z, root_angle, q...).
namespace wbt::sim {

using SpatialVec = Eigen::Vector3d;

Mat3 spatial_inertia(double mass, double inertia_com, const Vec2& com);

inline SpatialVec cross_motion(const SpatialVec& v, const SpatialVec& m) {
  const Vec2 u = v.tail<2>();
  const Vec2 um = m.tail<2>();
  SpatialVec out;
  out(0) = 0.0;
  out.tail<2>() = v(0) * perp(um) - m(0) * perp(u);
  return out;
}

inline SpatialVec cross_force(const SpatialVec& v, const SpatialVec& f) {
  const Vec2 u = v.tail<2>();
  const Vec2 lin = f.tail<2>();
  SpatialVec out;
  out(0) = cross2(u, lin);
  out.tail<2>() = v(0) * perp(lin);
  return out;
}

// Joint-space mass matrix by the composite rigid body algorithm, including
// joint armature on the diagonal.
Mat mass_matrix(const RobotModel& model, const Vec& gen_pos);

// Recursive Newton-Euler: generalized forces needed to produce gen_acc.
Vec inverse_dynamics(const RobotModel& model, const Vec& gen_pos,
                     const Vec& gen_vel, const Vec& gen_acc,
                     bool with_gravity = true);

// Coriolis, centrifugal and gravity terms: inverse_dynamics at zero
// acceleration.
Vec bias_forces(const RobotModel& model, const Vec& gen_pos,
                const Vec& gen_vel);

double kinetic_energy(const RobotModel& model, const Vec& gen_pos,
                      const Vec& gen_vel);
double potential_energy(const RobotModel& model, const Vec& gen_pos);

}  // namespace wbt::sim

#endif  // WBT_SIM_DYNAMICS_HPP_
