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

#ifndef WBT_SIM_RANDOMIZATION_HPP_
#define WBT_SIM_RANDOMIZATION_HPP_

#include <string>
#include <vector>

#include "wbt/common.hpp"
#include "wbt/sim/robot_model.hpp"

namespace wbt::sim {

enum class RandomizationMode { kNone, kAssetOnly, kAssetAndDynamics };

const char* to_string(RandomizationMode m);
RandomizationMode randomization_mode_from_string(const std::string& s);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool valid() const { return lo <= hi; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Asset properties are sampled per episode in every mode except kNone; the
// dynamics class (gains, torque noise, pushes) only in kAssetAndDynamics.
struct RandomizationSpec {
  RandomizationMode mode = RandomizationMode::kNone;
  Interval friction_range{0.7, 1.2};
  Interval mass_scale_range{0.9, 1.1};
  Interval com_offset_range{-0.02, 0.02};  // m along the link
  Interval pd_scale_range{0.85, 1.15};
  double torque_noise_std = 2.0;           // N*m
  double push_interval_s = 2.0;            // mean of the Poisson process
  Interval push_magnitude_range{0.1, 0.4}; // m/s root velocity change

  void validate() const;
};

struct Push {
  double time = 0.0;  // s since episode start
  Vec2 delta_linvel = Vec2::Zero();
};

struct PerturbationSchedule {
  double torque_noise_std = 0.0;
  std::vector<Push> pushes;
  bool empty() const { return torque_noise_std == 0.0 && pushes.empty(); }
};

struct RandomizedModel {
  RobotModel model;
  PerturbationSchedule schedule;
};

// Samples one episode's worth of parameters. `episode_s` bounds the push
// schedule.
RandomizedModel randomize(const RobotModel& model, const RandomizationSpec& spec,
                          Rng& rng, double episode_s = 10.0);

}  // namespace wbt::sim

#endif  // WBT_SIM_RANDOMIZATION_HPP_
