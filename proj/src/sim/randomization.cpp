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

#include "wbt/sim/randomization.hpp"

namespace wbt::sim {

const char* to_string(RandomizationMode m) {
  switch (m) {
    case RandomizationMode::kNone:
      return "none";
    case RandomizationMode::kAssetOnly:
      return "asset_only";
    case RandomizationMode::kAssetAndDynamics:
      return "asset_and_dynamics";
  }
  return "none";
}

RandomizationMode randomization_mode_from_string(const std::string& s) {
  if (s == "none") return RandomizationMode::kNone;
  if (s == "asset_only") return RandomizationMode::kAssetOnly;
  if (s == "asset_and_dynamics") return RandomizationMode::kAssetAndDynamics;
  throw ConfigError("unknown randomization mode '" + s + "'");
}

void RandomizationSpec::validate() const {
  const bool ok = friction_range.valid() && mass_scale_range.valid() &&
                  com_offset_range.valid() && pd_scale_range.valid() &&
                  push_magnitude_range.valid() && torque_noise_std >= 0.0 &&
                  push_interval_s > 0.0;
  if (!ok) throw InvalidInput("randomization spec: every interval needs lo <= hi");
}

RandomizedModel randomize(const RobotModel& model, const RandomizationSpec& spec,
                          Rng& rng, double episode_s) {
  spec.validate();
  RandomizedModel out{model, {}};
  if (spec.mode == RandomizationMode::kNone) return out;

  RobotModel& m = out.model;
  m.friction_coeff = uniform(rng, spec.friction_range.lo, spec.friction_range.hi);
  for (int i = 0; i < m.n_links(); ++i) {
    const double scale =
        uniform(rng, spec.mass_scale_range.lo, spec.mass_scale_range.hi);
    // Keep the nominal inertia proportional to the scaled mass.
    if (!m.link_inertias.empty()) m.link_inertias[i] *= scale;
    m.link_masses[i] *= scale;
    const double offset =
        uniform(rng, spec.com_offset_range.lo, spec.com_offset_range.hi);
    m.link_coms[i] =
        std::clamp(m.link_coms[i] + offset, 0.0, m.link_lengths[i]);
  }
  m.root_mass *= uniform(rng, spec.mass_scale_range.lo, spec.mass_scale_range.hi);

  if (spec.mode != RandomizationMode::kAssetAndDynamics) return out;

  for (int i = 0; i < m.n_joints(); ++i) {
    const double s = uniform(rng, spec.pd_scale_range.lo, spec.pd_scale_range.hi);
    m.pd_kp[i] *= s;
    m.pd_kd[i] *= s;
  }
  out.schedule.torque_noise_std = spec.torque_noise_std;
  std::exponential_distribution<double> gap(1.0 / spec.push_interval_s);
  for (double t = gap(rng); t < episode_s; t += gap(rng)) {
    const double mag =
        uniform(rng, spec.push_magnitude_range.lo, spec.push_magnitude_range.hi);
    const double sign = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
    out.schedule.pushes.push_back({t, Vec2(sign * mag, 0.0)});
  }
  return out;
}

}  // namespace wbt::sim
