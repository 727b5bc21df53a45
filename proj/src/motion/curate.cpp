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

#include "wbt/motion/curate.hpp"

#include <sstream>

#include <json.hpp>

namespace wbt::motion {

void CurationPolicy::validate() const {
  if (min_frames <= 0 || !(max_joint_vel > 0.0) || !(max_joint_acc > 0.0) ||
      !(max_root_speed > 0.0))
    throw ConfigError("curation policy: all thresholds must be > 0");
}

const char* to_string(CurationRule r) {
  switch (r) {
    case CurationRule::kMinFrames:
      return "min_frames";
    case CurationRule::kMaxJointVel:
      return "max_joint_vel";
    case CurationRule::kMaxJointAcc:
      return "max_joint_acc";
    case CurationRule::kMaxRootSpeed:
      return "max_root_speed";
  }
  return "unknown";
}

bool first_violation(const MotionClip& clip, const CurationPolicy& policy,
                     Rejection* out) {
  auto reject = [&](CurationRule rule, int frame, double value, double limit) {
    if (out != nullptr) *out = {clip.name, rule, frame, value, limit};
    return true;
  };
  const int n = clip.size();
  if (n < policy.min_frames)
    return reject(CurationRule::kMinFrames, 0, n, policy.min_frames);
  const double fps = clip.fps;
  for (int t = 0; t + 1 < n; ++t) {
    const double v =
        (clip.frames[t + 1].q - clip.frames[t].q).cwiseAbs().maxCoeff() * fps;
    if (v > policy.max_joint_vel)
      return reject(CurationRule::kMaxJointVel, t, v, policy.max_joint_vel);
  }
  for (int t = 1; t + 1 < n; ++t) {
    const double a = (clip.frames[t + 1].q - 2.0 * clip.frames[t].q +
                      clip.frames[t - 1].q)
                         .cwiseAbs()
                         .maxCoeff() *
                     fps * fps;
    if (a > policy.max_joint_acc)
      return reject(CurationRule::kMaxJointAcc, t, a, policy.max_joint_acc);
  }
  for (int t = 0; t + 1 < n; ++t) {
    const double s =
        (clip.frames[t + 1].root_pos - clip.frames[t].root_pos).norm() * fps;
    if (s > policy.max_root_speed)
      return reject(CurationRule::kMaxRootSpeed, t, s, policy.max_root_speed);
  }
  return false;
}

CurationResult curate(const std::vector<MotionClip>& clips,
                      const CurationPolicy& policy) {
  policy.validate();
  CurationResult result;
  for (const auto& clip : clips) {
    Rejection r;
    if (first_violation(clip, policy, &r))
      result.rejected.push_back(r);
    else
      result.kept.push_back(clip);
  }
  return result;
}

std::string rejection_report(const std::vector<Rejection>& rejected) {
  std::ostringstream out;
  for (const auto& r : rejected) {
    nlohmann::json j;
    j["clip"] = r.clip;
    j["rule"] = to_string(r.rule);
    j["frame"] = r.frame;
    j["value"] = r.value;
    j["limit"] = r.limit;
    out << j.dump() << "\n";
  }
  return out.str();
}

}  // namespace wbt::motion
