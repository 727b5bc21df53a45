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

#ifndef WBT_MOTION_CLIP_HPP_
#define WBT_MOTION_CLIP_HPP_

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "wbt/common.hpp"
#include "wbt/sim/robot_model.hpp"

namespace wbt::motion {

enum class ClipSource { kSynthetic, kRetargeted, kExternal };

struct Frame {
  Vec2 root_pos = Vec2::Zero();
  double root_angle = 0.0;
  Vec q;
  Points2 keypoints;  // column 0 is the root
  Vec2 root_linvel = Vec2::Zero();
  double root_angvel = 0.0;
  Vec qdot;
};

// Reference trajectory sampled at a fixed frame rate. Treated as immutable
// once built.
struct MotionClip {
  std::string name;
  double fps = 50.0;
  ClipSource source = ClipSource::kSynthetic;
  std::vector<Frame> frames;

  int size() const { return static_cast<int>(frames.size()); }
  int n_joints() const { return frames.empty() ? 0 : frames[0].q.size(); }
  double duration() const { return size() > 0 ? (size() - 1) / fps : 0.0; }
  const Frame& at(int i) const { return frames.at(static_cast<size_t>(i)); }
  // Clamps to the last frame.
  const Frame& clamped(int i) const {
    return frames[static_cast<size_t>(std::clamp(i, 0, size() - 1))];
  }
};

const char* to_string(ClipSource s);
ClipSource clip_source_from_string(const std::string& s);

struct Pose {
  Vec2 root_pos = Vec2::Zero();
  double root_angle = 0.0;
  Vec q;
};

// Builds a clip from a pose sequence: keypoints by forward kinematics of
// `model`, velocities by central differences (one-sided at the ends).
MotionClip build_clip(const sim::RobotModel& model, std::string name,
                      double fps, ClipSource source,
                      const std::vector<Pose>& poses);

// Recomputes root and joint velocities from positions. Root angle
// differences are wrapped.
void fill_velocities(MotionClip& clip);

// Largest deviation of qdot, root_linvel and root_angvel from central
// differences over interior frames. Zero for clips with < 3 frames.
double velocity_consistency_error(const MotionClip& clip);

// Throws InvalidInput on ragged frames, non-finite values or fps <= 0.
void validate_clip(const MotionClip& clip);

// Line-delimited JSON: one header record, then one record per frame.
std::string clip_to_string(const MotionClip& clip);
MotionClip clip_from_string(const std::string& text);
void save_clip(const MotionClip& clip, const std::filesystem::path& path);
// Rejects clips whose velocities disagree with their positions by more than
// `velocity_tol` (negative disables the check).
MotionClip load_clip(const std::filesystem::path& path,
                     double velocity_tol = 1e-6);

}  // namespace wbt::motion

#endif  // WBT_MOTION_CLIP_HPP_
