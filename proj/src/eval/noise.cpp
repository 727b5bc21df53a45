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

#include "wbt/eval/noise.hpp"

namespace wbt::eval {

NoiseSpec NoiseSpec::from_level(int level) {
  if (level < 0 || level > 2)
    throw InvalidInput("noise level must be 0, 1 or 2, got " +
                       std::to_string(level));
  NoiseSpec n;
  n.level = level;
  const double k = static_cast<double>(level);
  n.q_std = 0.01 * k;
  n.qdot_std = 0.1 * k;
  n.angvel_std = 0.05 * k;
  n.gravity_std = 0.02 * k;
  return n;
}

bool NoiseSpec::is_zero() const {
  return q_std == 0.0 && qdot_std == 0.0 && angvel_std == 0.0 &&
         gravity_std == 0.0;
}

Vec2 gravity_in_root(double root_angle) {
  return {-std::sin(root_angle), -std::cos(root_angle)};
}

double root_angle_from_gravity(const Vec2& g) {
  return std::atan2(-g(0), -g(1));
}

Observation observe(const sim::SimState& state, const NoiseSpec& noise,
                    Rng& rng) {
  const auto n = state.q.size();
  const Vec eps = normal_vec(rng, 2 * n + 3);
  Observation obs;
  obs.state = state;
  obs.state.q += noise.q_std * eps.head(n);
  obs.state.qdot += noise.qdot_std * eps.segment(n, n);
  obs.state.root_angvel += noise.angvel_std * eps(2 * n);
  obs.gravity = gravity_in_root(state.root_angle) +
                noise.gravity_std * eps.tail<2>();
  if (noise.gravity_std != 0.0)
    obs.state.root_angle = root_angle_from_gravity(obs.gravity);
  return obs;
}

}  // namespace wbt::eval
