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

#ifndef WBT_MOTION_CURATE_HPP_
#define WBT_MOTION_CURATE_HPP_

#include <string>
#include <vector>

#include "wbt/motion/clip.hpp"

namespace wbt::motion {

// Kinematic feasibility thresholds. Rates come from finite differences of
// positions at the clip frame rate, not from the stored velocities.
struct CurationPolicy {
  int min_frames = 10;
  double max_joint_vel = 15.0;    // rad/s
  double max_joint_acc = 600.0;   // rad/s^2
  double max_root_speed = 3.0;    // m/s

  void validate() const;  // throws ConfigError
};

enum class CurationRule { kMinFrames, kMaxJointVel, kMaxJointAcc, kMaxRootSpeed };

const char* to_string(CurationRule r);

struct Rejection {
  std::string clip;
  CurationRule rule = CurationRule::kMinFrames;
  int frame = 0;        // first offending frame (pair start for rates)
  double value = 0.0;   // offending measurement
  double limit = 0.0;
};

struct CurationResult {
  std::vector<MotionClip> kept;
  std::vector<Rejection> rejected;
};

// Finds the first violated rule, checked in the order min_frames,
// max_joint_vel, max_joint_acc, max_root_speed. Returns false when the clip
// passes; otherwise fills `out` (if non-null) and returns true.
bool first_violation(const MotionClip& clip, const CurationPolicy& policy,
                     Rejection* out);

CurationResult curate(const std::vector<MotionClip>& clips,
                      const CurationPolicy& policy);

// One JSON record per rejected clip.
std::string rejection_report(const std::vector<Rejection>& rejected);

}  // namespace wbt::motion

#endif  // WBT_MOTION_CURATE_HPP_
