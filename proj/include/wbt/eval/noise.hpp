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

#ifndef WBT_EVAL_NOISE_HPP_
#define WBT_EVAL_NOISE_HPP_

#include "wbt/common.hpp"
#include "wbt/sim/simulator.hpp"

namespace wbt::eval {

// Per-channel Gaussian observation noise.
struct NoiseSpec {
  int level = 0;
  double q_std = 0.0;        // rad
  double qdot_std = 0.0;     // rad/s
  double angvel_std = 0.0;   // rad/s
  double gravity_std = 0.0;  // components of the unit gravity vector

  // Level 0 is noise-free, level 1 is (0.01, 0.1, 0.05, 0.02), level 2 doubles
  // level 1. Throws InvalidInput outside [0, 2].
  static NoiseSpec from_level(int level);
  bool is_zero() const;
};

// Unit gravity direction expressed in the root frame.
Vec2 gravity_in_root(double root_angle);
// Inverse of gravity_in_root for any non-zero vector.
double root_angle_from_gravity(const Vec2& g);

// What a policy gets to see. `state` carries the noisy q, qdot and root
// angular velocity, and the root angle implied by the noisy gravity vector.
struct Observation {
  sim::SimState state;
  Vec2 gravity = Vec2(0.0, -1.0);
};

// Always draws n_joints * 2 + 3 normals, whatever the level, so equal seeds
// give noise patterns that differ across levels only in scale.
Observation observe(const sim::SimState& state, const NoiseSpec& noise,
                    Rng& rng);

}  // namespace wbt::eval

#endif  // WBT_EVAL_NOISE_HPP_
