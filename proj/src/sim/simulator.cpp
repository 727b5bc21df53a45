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

#include "wbt/sim/simulator.hpp"

#include <algorithm>

#include "wbt/sim/dynamics.hpp"
#include "wbt/sim/kinematics.hpp"

namespace wbt::sim {

Vec SimState::gen_pos() const {
  Vec out(q.size() + 3);
  out << root_pos, root_angle, q;
  return out;
}

Vec SimState::gen_vel() const {
  Vec out(qdot.size() + 3);
  out << root_linvel, root_angvel, qdot;
  return out;
}

void SimState::set_gen(const Vec& pos, const Vec& vel) {
  const auto n = pos.size() - 3;
  root_pos = pos.head<2>();
  root_angle = pos(2);
  q = pos.tail(n);
  root_linvel = vel.head<2>();
  root_angvel = vel(2);
  qdot = vel.tail(n);
}

bool SimState::finite() const {
  return root_pos.allFinite() && std::isfinite(root_angle) &&
         root_linvel.allFinite() && std::isfinite(root_angvel) &&
         q.allFinite() && qdot.allFinite() && prev_action.allFinite() &&
         std::isfinite(time);
}

SimState rest_state(const RobotModel& model, const Vec2& root_pos) {
  SimState s;
  s.root_pos = root_pos;
  s.q = Vec::Zero(model.n_joints());
  s.qdot = Vec::Zero(model.n_joints());
  s.prev_action = Vec::Zero(model.n_joints());
  return s;
}

Vec pd_torque(const RobotModel& model, const SimState& state,
              const Vec& action) {
  const int n = model.n_joints();
  if (action.size() != n)
    throw InvalidInput("pd_torque: action has " + std::to_string(action.size()) +
                       " entries, expected " + std::to_string(n));
  const Vec target = model.clamp_to_limits(action);
  Vec tau(n);
  for (int j = 0; j < n; ++j) {
    const double t = model.pd_kp[j] * (target(j) - state.q(j)) -
                     model.pd_kd[j] * state.qdot(j);
    tau(j) = std::clamp(t, -model.torque_limits[j], model.torque_limits[j]);
  }
  return tau;
}

namespace {

struct ContactLaw {
  Vec2 explicit_force = Vec2::Zero();
  bool normal_damped = false;   // damping handled implicitly
  bool tangent_damped = false;  // sticking regime, implicit viscous
  bool active = false;
};

ContactLaw contact_law(const RobotModel& model, const Vec2& pos,
                       const Vec2& vel) {
  ContactLaw law;
  if (pos(1) >= 0.0) return law;
  const double pen = -pos(1);
  const double normal =
      model.contact_stiffness * pen - model.contact_damping * vel(1);
  if (normal <= 0.0) return law;
  law.active = true;
  law.normal_damped = true;
  law.explicit_force(1) = model.contact_stiffness * pen;
  const double cap = model.friction_coeff * normal;
  if (cap <= 0.0) return law;
  if (model.friction_viscous * std::abs(vel(0)) <= cap) {
    law.tangent_damped = true;
  } else {
    law.explicit_force(0) = vel(0) > 0.0 ? -cap : cap;
  }
  return law;
}

template <typename Fn>
void for_each_contact(const RobotModel& model, const SimState& state,
                      const LinkPoses& poses, Fn&& fn) {
  const Vec gv = state.gen_vel();
  auto visit = [&](int link, const Vec2& p) {
    const auto jac = point_jacobian(model, state.root_pos, poses, link, p);
    const Vec2 v = jac * gv;
    fn(link, p, v, jac);
  };
  visit(-1, state.root_pos);
  for (int i = 0; i < model.n_links(); ++i) visit(i, poses.distal[i]);
}

}  // namespace

std::vector<ContactPoint> contact_points(const RobotModel& model,
                                         const SimState& state) {
  const auto poses =
      link_poses<double>(model, state.root_pos, state.root_angle, state.q);
  std::vector<ContactPoint> out;
  for_each_contact(model, state, poses,
                   [&](int link, const Vec2& p, const Vec2& v, const auto&) {
                     ContactPoint c;
                     c.link = link;
                     c.position = p;
                     c.velocity = v;
                     const auto law = contact_law(model, p, v);
                     c.active = law.active;
                     if (law.active) {
                       c.force = law.explicit_force;
                       c.force(1) -= model.contact_damping * v(1);
                       if (law.tangent_damped)
                         c.force(0) = -model.friction_viscous * v(0);
                     }
                     out.push_back(c);
                   });
  return out;
}

SimState step(const RobotModel& model, const SimState& state, const Vec& action,
              double dt, const Vec* torque_offset) {
  if (!(dt > 0.0)) throw InvalidInput("step: dt must be > 0");
  const int n = model.n_joints();
  if (action.size() != n)
    throw InvalidInput("step: action dimension " +
                       std::to_string(action.size()) + ", expected " +
                       std::to_string(n));
  const int nd = n + 3;
  const Vec pos = state.gen_pos();
  const Vec vel = state.gen_vel();

  const Mat mass = mass_matrix(model, pos);
  Vec force = -bias_forces(model, pos, vel);
  Mat damping = Mat::Zero(nd, nd);

  const Vec target = model.clamp_to_limits(action);
  for (int j = 0; j < n; ++j) {
    const double spring = model.pd_kp[j] * (target(j) - state.q(j));
    const double full = spring - model.pd_kd[j] * state.qdot(j);
    const double lim = model.torque_limits[j];
    if (std::abs(full) <= lim) {
      force(3 + j) += spring;
      damping(3 + j, 3 + j) += model.pd_kd[j];
    } else {
      force(3 + j) += std::clamp(full, -lim, lim);
    }
  }
  if (torque_offset != nullptr) force.tail(n) += *torque_offset;

  const auto poses =
      link_poses<double>(model, state.root_pos, state.root_angle, state.q);
  for_each_contact(
      model, state, poses,
      [&](int, const Vec2& p, const Vec2& v, const auto& jac) {
        const auto law = contact_law(model, p, v);
        if (!law.active) return;
        force += jac.transpose() * law.explicit_force;
        if (law.normal_damped)
          damping += model.contact_damping * jac.row(1).transpose() * jac.row(1);
        if (law.tangent_damped)
          damping +=
              model.friction_viscous * jac.row(0).transpose() * jac.row(0);
      });

  Vec new_vel = Vec::Zero(nd);
  const int first = model.fixed_base ? 3 : 0;
  const int m = nd - first;
  const Mat lhs =
      mass.bottomRightCorner(m, m) + dt * damping.bottomRightCorner(m, m);
  const Vec rhs =
      mass.bottomRightCorner(m, m) * vel.tail(m) + dt * force.tail(m);
  const Eigen::LDLT<Mat> solver(lhs);
  new_vel.tail(m) = solver.solve(rhs);

  // Joint limits as inelastic constraints: project the velocity in the
  // metric of the step matrix so that each violating joint lands exactly on
  // its limit. The correcting impulse is an internal torque pair, so
  // momentum of the whole body is preserved.
  std::vector<int> locked;
  Vec lock_vel;
  for (int pass = 0; pass < n; ++pass) {
    bool changed = false;
    for (int j = 0; j < n; ++j) {
      if (std::find(locked.begin(), locked.end(), j) != locked.end()) continue;
      const double next_q = pos(3 + j) + dt * new_vel(3 + j);
      const double lo = model.joint_limits[j](0);
      const double hi = model.joint_limits[j](1);
      if (next_q < lo || next_q > hi) {
        locked.push_back(j);
        lock_vel.conservativeResize(static_cast<Eigen::Index>(locked.size()));
        lock_vel(lock_vel.size() - 1) =
            ((next_q < lo ? lo : hi) - pos(3 + j)) / dt;
        changed = true;
      }
    }
    if (!changed) break;
    const auto k = static_cast<Eigen::Index>(locked.size());
    Mat sel = Mat::Zero(k, m);
    for (Eigen::Index r = 0; r < k; ++r) sel(r, 3 + locked[r] - first) = 1.0;
    const Mat inv_sel_t = solver.solve(sel.transpose());
    const Mat schur = sel * inv_sel_t;
    const Vec residual = sel * new_vel.tail(m) - lock_vel;
    new_vel.tail(m) -= inv_sel_t * schur.ldlt().solve(residual);
  }
  if (model.fixed_base) new_vel.head<3>().setZero();

  Vec new_pos = pos + dt * new_vel;
  for (int j = 0; j < n; ++j)
    new_pos(3 + j) = std::clamp(new_pos(3 + j), model.joint_limits[j](0),
                                model.joint_limits[j](1));

  SimState next = state;
  next.set_gen(new_pos, new_vel);
  next.prev_action = action;
  next.time = state.time + dt;
  if (!next.finite())
    throw SimulationDiverged(
        "simulation diverged at t=" + std::to_string(state.time), next);
  return next;
}

SimState control_step(const RobotModel& model, const SimState& state,
                      const Vec& action, const Vec* torque_offset) {
  SimState s = state;
  for (int i = 0; i < kSubsteps; ++i)
    s = step(model, s, action, kSimDt, torque_offset);
  return s;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kAlive:
      return "alive";
    case Termination::kFellOrientation:
      return "fell_orientation";
    case Termination::kLostTracking:
      return "lost_tracking";
  }
  return "unknown";
}

double mean_keypoint_distance(const Points2& a, const Points2& b) {
  return (a - b).colwise().norm().mean();
}

Termination check_termination(const RobotModel& model, const SimState& state,
                              const Points2& ref_keypoints) {
  if (std::abs(projected_gravity_lateral(state)) > kGravityTerminationThreshold)
    return Termination::kFellOrientation;
  const Points2 kp =
      forward_kinematics(model, state.root_pos, state.root_angle, state.q);
  if (mean_keypoint_distance(kp, ref_keypoints) > kTrackingTerminationDistance)
    return Termination::kLostTracking;
  return Termination::kAlive;
}

SimState state_from_frame(const motion::Frame& f) {
  SimState s;
  s.root_pos = f.root_pos;
  s.root_angle = f.root_angle;
  s.root_linvel = f.root_linvel;
  s.root_angvel = f.root_angvel;
  s.q = f.q;
  s.qdot = f.qdot;
  s.prev_action = f.q;
  return s;
}

std::pair<int, SimState> reference_state_init(const motion::MotionClip& clip,
                                              Rng& rng) {
  if (clip.size() < 2)
    throw InvalidClip("reference_state_init: clip '" + clip.name + "' has " +
                      std::to_string(clip.size()) +
                      " frame(s), need at least 2");
  std::uniform_int_distribution<int> pick(0, clip.size() - 2);
  const int frame = pick(rng);
  return {frame, state_from_frame(clip.frames[frame])};
}

}  // namespace wbt::sim
