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

#ifndef WBT_MOTION_GENERATE_HPP_
#define WBT_MOTION_GENERATE_HPP_

#include <string>

#include "wbt/common.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/sim/robot_model.hpp"

namespace wbt::motion {

enum class ClipKind { kWalk, kSquat, kWave, kKick, kTurn };

const char* to_string(ClipKind k);
ClipKind clip_kind_from_string(const std::string& s);

struct GeneratorParams {
  double amplitude = 1.0;  // 0 gives the neutral stance
  double period = 0.0;     // s; 0 selects the per-kind default
  // Relative spread of amplitude and period drawn from the rng.
  double jitter = 0.0;
  bool random_phase = false;
};

double default_period(ClipKind kind);

// Neutral stance: straight legs tilted back 0.06 rad, feet flat on the
// ground, torso upright. Requires the default biped topology.
Pose stance_pose(const sim::RobotModel& model);

// Analytic leg inverse kinematics for the biped. Places the ankle of `leg`
// (0 left, 1 right) at `ankle` (world) with the foot at absolute angle
// `foot_angle`, writing hip, knee and ankle joints of `pose.q`. The knee bends
// forward (negative flexion). Out-of-reach targets are projected onto the
// reachable disc.
void place_foot(const sim::RobotModel& model, int leg, const Vec2& ankle,
                double foot_angle, Pose& pose);

// Synthetic reference clip for the biped. Frames are sampled at t = i / fps,
// i < floor(duration_s * fps); keypoints follow from forward kinematics and
// velocities from central differences. Throws InvalidInput when fewer than
// two frames result.
MotionClip generate_clip(ClipKind kind, const GeneratorParams& params,
                         double fps, double duration_s, Rng& rng,
                         const sim::RobotModel& model);

}  // namespace wbt::motion

#endif  // WBT_MOTION_GENERATE_HPP_
