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

#include "wbt/sim/dynamics.hpp"

#include <vector>

namespace wbt::sim {
namespace {

// Per-body quantities. Body 0 is the root, body i + 1 is link i.
struct Bodies {
  LinkPoses poses;
  std::vector<Mat3> inertia;
  std::vector<SpatialVec> axis;  // joint motion subspace, links only
  Eigen::Matrix3d root_axes;     // columns: x, z, rotation about root
  std::vector<int> parent;       // body index of parent
};

Bodies build_bodies(const RobotModel& model, const Vec& gen_pos) {
  const int n = model.n_links();
  const Vec2 root_pos = gen_pos.head<2>();
  Bodies b;
  b.poses = link_poses<double>(model, root_pos, gen_pos(2), gen_pos.tail(n));
  b.inertia.resize(n + 1);
  b.axis.resize(n + 1, SpatialVec::Zero());
  b.parent.resize(n + 1, -1);
  b.inertia[0] = spatial_inertia(model.root_mass, model.root_inertia, root_pos);
  b.root_axes << 0.0, 0.0, 1.0,  //
      1.0, 0.0, root_pos(1),     //
      0.0, 1.0, -root_pos(0);
  for (int i = 0; i < n; ++i) {
    b.inertia[i + 1] = spatial_inertia(model.link_masses[i],
                                       model.link_inertia(i), b.poses.com[i]);
    const Vec2& r = b.poses.proximal[i];
    b.axis[i + 1] = SpatialVec(1.0, r(1), -r(0));
    b.parent[i + 1] = model.link_parents[i] + 1;
  }
  return b;
}

}  // namespace

Mat3 spatial_inertia(double mass, double inertia_com, const Vec2& com) {
  const Vec2 pc = perp(com);
  Mat3 out;
  out(0, 0) = inertia_com + mass * com.squaredNorm();
  out.block<1, 2>(0, 1) = mass * pc.transpose();
  out.block<2, 1>(1, 0) = mass * pc;
  out.block<2, 2>(1, 1) = mass * Mat2::Identity();
  return out;
}

Mat mass_matrix(const RobotModel& model, const Vec& gen_pos) {
  const int n = model.n_links();
  const Bodies b = build_bodies(model, gen_pos);

  std::vector<Mat3> composite = b.inertia;
  for (int i = n; i >= 1; --i) composite[b.parent[i]] += composite[i];

  Mat mass = Mat::Zero(n + 3, n + 3);
  mass.topLeftCorner<3, 3>() =
      b.root_axes.transpose() * composite[0] * b.root_axes;
  for (int i = 1; i <= n; ++i) {
    const SpatialVec force = composite[i] * b.axis[i];
    const int di = i + 2;
    mass(di, di) = b.axis[i].dot(force) + model.armature[i - 1];
    for (int j = b.parent[i]; j >= 1; j = b.parent[j]) {
      const int dj = j + 2;
      mass(di, dj) = mass(dj, di) = b.axis[j].dot(force);
    }
    const Eigen::Vector3d root_part = b.root_axes.transpose() * force;
    mass.block<1, 3>(di, 0) = root_part.transpose();
    mass.block<3, 1>(0, di) = root_part;
  }
  return mass;
}

Vec inverse_dynamics(const RobotModel& model, const Vec& gen_pos,
                     const Vec& gen_vel, const Vec& gen_acc,
                     bool with_gravity) {
  const int n = model.n_links();
  const Bodies b = build_bodies(model, gen_pos);
  std::vector<SpatialVec> vel(n + 1), acc(n + 1), force(n + 1);

  const Eigen::Vector3d root_rate = gen_vel.head<3>();
  vel[0] = b.root_axes * root_rate;
  // Time derivative of the rotation axis, whose pivot moves with the root.
  const SpatialVec root_axis_dot(0.0, gen_vel(1), -gen_vel(0));
  acc[0] = b.root_axes * gen_acc.head<3>() + root_axis_dot * gen_vel(2);
  // Gravity enters as a fictitious upward acceleration of the base.
  if (with_gravity) acc[0](2) += model.gravity;

  for (int i = 1; i <= n; ++i) {
    const double qd = gen_vel(i + 2);
    vel[i] = vel[b.parent[i]] + b.axis[i] * qd;
    acc[i] = acc[b.parent[i]] + b.axis[i] * gen_acc(i + 2) +
             cross_motion(vel[i], b.axis[i]) * qd;
  }
  for (int i = 0; i <= n; ++i)
    force[i] = b.inertia[i] * acc[i] +
               cross_force(vel[i], b.inertia[i] * vel[i]);

  Vec tau(n + 3);
  for (int i = n; i >= 1; --i) {
    tau(i + 2) =
        b.axis[i].dot(force[i]) + model.armature[i - 1] * gen_acc(i + 2);
    force[b.parent[i]] += force[i];
  }
  tau.head<3>() = b.root_axes.transpose() * force[0];
  return tau;
}

Vec bias_forces(const RobotModel& model, const Vec& gen_pos,
                const Vec& gen_vel) {
  return inverse_dynamics(model, gen_pos, gen_vel,
                          Vec::Zero(gen_vel.size()), true);
}

double kinetic_energy(const RobotModel& model, const Vec& gen_pos,
                      const Vec& gen_vel) {
  return 0.5 * gen_vel.dot(mass_matrix(model, gen_pos) * gen_vel);
}

double potential_energy(const RobotModel& model, const Vec& gen_pos) {
  const int n = model.n_links();
  const Vec2 root_pos = gen_pos.head<2>();
  const auto poses =
      link_poses<double>(model, root_pos, gen_pos(2), gen_pos.tail(n));
  double v = model.root_mass * root_pos(1);
  for (int i = 0; i < n; ++i) v += model.link_masses[i] * poses.com[i](1);
  return model.gravity * v;
}

}  // namespace wbt::sim
