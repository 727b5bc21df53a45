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

#include "wbt/motion/clip.hpp"

#include <sstream>

#include <json.hpp>

#include "wbt/sim/kinematics.hpp"

namespace wbt::motion {

using nlohmann::json;

namespace {

constexpr int kClipFormatVersion = 1;

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec vec_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vec2 vec2_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 2) throw InvalidInput("clip: expected a 2-vector");
  return Vec2(v[0], v[1]);
}

}  // namespace

const char* to_string(ClipSource s) {
  switch (s) {
    case ClipSource::kSynthetic:
      return "synthetic";
    case ClipSource::kRetargeted:
      return "retargeted";
    case ClipSource::kExternal:
      return "external";
  }
  return "unknown";
}

ClipSource clip_source_from_string(const std::string& s) {
  if (s == "synthetic") return ClipSource::kSynthetic;
  if (s == "retargeted") return ClipSource::kRetargeted;
  if (s == "external") return ClipSource::kExternal;
  throw InvalidInput("unknown clip source '" + s + "'");
}

MotionClip build_clip(const sim::RobotModel& model, std::string name,
                      double fps, ClipSource source,
                      const std::vector<Pose>& poses) {
  if (!(fps > 0.0)) throw InvalidInput("build_clip: fps must be > 0");
  MotionClip clip;
  clip.name = std::move(name);
  clip.fps = fps;
  clip.source = source;
  clip.frames.reserve(poses.size());
  for (const auto& p : poses) {
    Frame f;
    f.root_pos = p.root_pos;
    f.root_angle = p.root_angle;
    f.q = p.q;
    f.keypoints = sim::forward_kinematics(model, p.root_pos, p.root_angle, p.q);
    clip.frames.push_back(std::move(f));
  }
  fill_velocities(clip);
  return clip;
}

void fill_velocities(MotionClip& clip) {
  const int n = clip.size();
  for (int t = 0; t < n; ++t) {
    Frame& f = clip.frames[t];
    f.qdot = Vec::Zero(f.q.size());
    f.root_linvel.setZero();
    f.root_angvel = 0.0;
    if (n < 2) continue;
    const int a = std::max(t - 1, 0);
    const int b = std::min(t + 1, n - 1);
    const double scale = clip.fps / (b - a);
    const Frame& fa = clip.frames[a];
    const Frame& fb = clip.frames[b];
    f.qdot = (fb.q - fa.q) * scale;
    f.root_linvel = (fb.root_pos - fa.root_pos) * scale;
    f.root_angvel = wrap_angle(fb.root_angle - fa.root_angle) * scale;
  }
}

double velocity_consistency_error(const MotionClip& clip) {
  double worst = 0.0;
  const double half = 0.5 * clip.fps;
  for (int t = 1; t + 1 < clip.size(); ++t) {
    const Frame& p = clip.frames[t - 1];
    const Frame& f = clip.frames[t];
    const Frame& n = clip.frames[t + 1];
    worst = std::max(worst, (f.qdot - (n.q - p.q) * half).norm());
    worst = std::max(worst, (f.root_linvel - (n.root_pos - p.root_pos) * half).norm());
    worst = std::max(
        worst, std::abs(f.root_angvel - wrap_angle(n.root_angle - p.root_angle) * half));
  }
  return worst;
}

void validate_clip(const MotionClip& clip) {
  if (!(clip.fps > 0.0) || !std::isfinite(clip.fps))
    throw InvalidInput("clip '" + clip.name + "': fps must be > 0");
  if (clip.frames.empty()) return;
  const auto nj = clip.frames[0].q.size();
  const auto nk = clip.frames[0].keypoints.cols();
  for (int t = 0; t < clip.size(); ++t) {
    const Frame& f = clip.frames[t];
    const std::string where =
        "clip '" + clip.name + "' frame " + std::to_string(t);
    if (f.q.size() != nj || f.qdot.size() != nj || f.keypoints.cols() != nk)
      throw InvalidInput(where + ": inconsistent dimensions");
    if (!f.root_pos.allFinite() || !std::isfinite(f.root_angle) ||
        !f.q.allFinite() || !f.qdot.allFinite() || !f.keypoints.allFinite() ||
        !f.root_linvel.allFinite() || !std::isfinite(f.root_angvel))
      throw InvalidInput(where + ": non-finite value");
  }
}

std::string clip_to_string(const MotionClip& clip) {
  std::ostringstream out;
  json header;
  header["format"] = "wbtrack-clip";
  header["format_version"] = kClipFormatVersion;
  header["name"] = clip.name;
  header["fps"] = clip.fps;
  header["source"] = to_string(clip.source);
  header["n_frames"] = clip.size();
  header["n_joints"] = clip.n_joints();
  header["n_keypoints"] = clip.frames.empty() ? 0 : clip.frames[0].keypoints.cols();
  out << header.dump() << "\n";
  for (int t = 0; t < clip.size(); ++t) {
    const Frame& f = clip.frames[t];
    json r;
    r["t"] = t;
    r["root_pos"] = {f.root_pos(0), f.root_pos(1)};
    r["root_angle"] = f.root_angle;
    r["q"] = vec_json(f.q);
    json kp = json::array();
    for (Eigen::Index k = 0; k < f.keypoints.cols(); ++k)
      kp.push_back({f.keypoints(0, k), f.keypoints(1, k)});
    r["keypoints"] = std::move(kp);
    r["root_linvel"] = {f.root_linvel(0), f.root_linvel(1)};
    r["root_angvel"] = f.root_angvel;
    r["qdot"] = vec_json(f.qdot);
    out << r.dump() << "\n";
  }
  return out.str();
}

MotionClip clip_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  MotionClip clip;
  int n_frames = -1;
  int n_joints = -1;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      const json r = json::parse(line);
      if (n_frames < 0) {
        if (r.value("format", "") != "wbtrack-clip")
          throw InvalidInput("not a clip file");
        if (r.at("format_version").get<int>() != kClipFormatVersion)
          throw InvalidInput("unsupported clip format_version");
        clip.name = r.at("name").get<std::string>();
        clip.fps = r.at("fps").get<double>();
        clip.source = clip_source_from_string(r.at("source").get<std::string>());
        n_frames = r.at("n_frames").get<int>();
        n_joints = r.at("n_joints").get<int>();
        continue;
      }
      Frame f;
      f.root_pos = vec2_from(r.at("root_pos"));
      f.root_angle = r.at("root_angle").get<double>();
      f.q = vec_from(r.at("q"));
      const auto& kp = r.at("keypoints");
      f.keypoints.resize(2, static_cast<Eigen::Index>(kp.size()));
      for (std::size_t k = 0; k < kp.size(); ++k)
        f.keypoints.col(static_cast<Eigen::Index>(k)) = vec2_from(kp[k]);
      f.root_linvel = vec2_from(r.at("root_linvel"));
      f.root_angvel = r.at("root_angvel").get<double>();
      f.qdot = vec_from(r.at("qdot"));
      if (f.q.size() != n_joints)
        throw InvalidInput("joint count disagrees with header");
      clip.frames.push_back(std::move(f));
    }
  } catch (const json::exception& e) {
    throw InvalidInput("clip line " + std::to_string(line_no) + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw InvalidInput("clip line " + std::to_string(line_no) + ": " + e.what());
  }
  if (n_frames < 0) throw InvalidInput("clip: missing header");
  if (clip.size() != n_frames)
    throw InvalidInput("clip '" + clip.name + "': header promises " +
                       std::to_string(n_frames) + " frames, found " +
                       std::to_string(clip.size()));
  validate_clip(clip);
  return clip;
}

void save_clip(const MotionClip& clip, const std::filesystem::path& path) {
  write_text_file(path, clip_to_string(clip));
}

MotionClip load_clip(const std::filesystem::path& path, double velocity_tol) {
  MotionClip clip = clip_from_string(read_text_file(path));
  if (velocity_tol >= 0.0) {
    const double err = velocity_consistency_error(clip);
    if (err > velocity_tol)
      throw InvalidInput(path.string() + ": velocities disagree with " +
                         "finite differences by " + std::to_string(err));
  }
  return clip;
}

}  // namespace wbt::motion
