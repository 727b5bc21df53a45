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

#ifndef WBT_SIM_SIMULATOR_HPP_
#define WBT_SIM_SIMULATOR_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "wbt/common.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/sim/robot_model.hpp"

namespace wbt::sim {

inline constexpr double kSimDt = 1.0 / 200.0;
inline constexpr int kSubsteps = 4;
inline constexpr double kControlDt = kSimDt * kSubsteps;

struct SimState {
  Vec2 root_pos = Vec2::Zero();
  double root_angle = 0.0;
  Vec2 root_linvel = Vec2::Zero();
  double root_angvel = 0.0;
  Vec q;
  Vec qdot;
  Vec prev_action;
  double time = 0.0;
  std::uint64_t rng_stream = 0;

  Vec gen_pos() const;
  Vec gen_vel() const;
  void set_gen(const Vec& pos, const Vec& vel);
  bool finite() const;
};

// Zero pose with the root at `root_pos`, at rest.
SimState rest_state(const RobotModel& model, const Vec2& root_pos);

class SimulationDiverged : public Error {
 public:
  SimulationDiverged(const std::string& what, SimState state)
      : Error(what), state_(std::move(state)) {}
  const SimState& state() const { return state_; }

 private:
  SimState state_;
};

class InvalidClip : public Error {
 public:
  using Error::Error;
};

// tau = kp * (clamp(action) - q) - kd * qdot, clamped to torque_limits.
Vec pd_torque(const RobotModel& model, const SimState& state,
              const Vec& action);

struct ContactPoint {
  int link = -1;  // -1 for the root body
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  Vec2 force = Vec2::Zero();
  bool active = false;
};

// Penalty contact at the root and every link endpoint: spring-damper normal
// force, regularized Coulomb friction capped at mu * N. Forces are those the
// explicit law produces at the given state.
std::vector<ContactPoint> contact_points(const RobotModel& model,
                                         const SimState& state);

// One semi-implicit Euler step of length dt. Joint damping and contact
// damping/friction are integrated implicitly in velocity; springs and
// gravity explicitly. `torque_offset` (may be null) is added after the
// torque clamp.
SimState step(const RobotModel& model, const SimState& state, const Vec& action,
              double dt, const Vec* torque_offset = nullptr);

// kSubsteps steps of kSimDt with a zero-order-hold action.
SimState control_step(const RobotModel& model, const SimState& state,
                      const Vec& action, const Vec* torque_offset = nullptr);

enum class Termination { kAlive, kFellOrientation, kLostTracking };
const char* to_string(Termination t);

inline constexpr double kGravityTerminationThreshold = 0.8;
inline constexpr double kTrackingTerminationDistance = 0.5;

// Planar analog of the projected gravity lateral component.
inline double projected_gravity_lateral(const SimState& s) {
  return std::sin(s.root_angle);
}

double mean_keypoint_distance(const Points2& a, const Points2& b);

Termination check_termination(const RobotModel& model, const SimState& state,
                              const Points2& ref_keypoints);

// Picks a start frame uniformly in [0, size - 2] and copies that frame into a
// simulator state. Throws InvalidClip for clips shorter than two frames.
std::pair<int, SimState> reference_state_init(const motion::MotionClip& clip,
                                              Rng& rng);

SimState state_from_frame(const motion::Frame& frame);

}  // namespace wbt::sim

#endif  // WBT_SIM_SIMULATOR_HPP_
