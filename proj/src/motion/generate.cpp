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

#include "wbt/motion/generate.hpp"

#include <cmath>
#include <vector>

namespace wbt::motion {

namespace {

constexpr int kTorso = 0;
constexpr int kThigh[2] = {1, 2};
constexpr int kShank[2] = {3, 4};
constexpr int kFoot[2] = {5, 6};
constexpr double kStanceTilt = 0.06;

void require_biped(const sim::RobotModel& m) {
  const std::vector<int> parents = {-1, -1, -1, 1, 2, 3, 4};
  if (m.n_links() != 7 || m.link_parents != parents)
    throw InvalidInput("clip generators need the 7-link biped topology");
}

double leg_length(const sim::RobotModel& m) {
  return m.link_lengths[kThigh[0]] + m.link_lengths[kShank[0]];
}

// Hip-to-ankle vector of the neutral stance in the root frame.
Vec2 stance_ankle(const sim::RobotModel& m) {
  const double l = leg_length(m);
  return Vec2(-l * std::sin(kStanceTilt), -l * std::cos(kStanceTilt));
}

double smoothstep(double s) { return s * s * (3.0 - 2.0 * s); }

double frac(double x) { return x - std::floor(x); }

}  // namespace

const char* to_string(ClipKind k) {
  switch (k) {
    case ClipKind::kWalk:
      return "walk";
    case ClipKind::kSquat:
      return "squat";
    case ClipKind::kWave:
      return "wave";
    case ClipKind::kKick:
      return "kick";
    case ClipKind::kTurn:
      return "turn";
  }
  return "unknown";
}

ClipKind clip_kind_from_string(const std::string& s) {
  if (s == "walk") return ClipKind::kWalk;
  if (s == "squat") return ClipKind::kSquat;
  if (s == "wave") return ClipKind::kWave;
  if (s == "kick") return ClipKind::kKick;
  if (s == "turn") return ClipKind::kTurn;
  throw InvalidInput("unknown clip kind '" + s + "'");
}

double default_period(ClipKind kind) {
  switch (kind) {
    case ClipKind::kWalk:
      return 1.0;
    case ClipKind::kSquat:
      return 2.0;
    case ClipKind::kWave:
      return 1.5;
    case ClipKind::kKick:
      return 1.5;
    case ClipKind::kTurn:
      return 2.0;
  }
  return 1.0;
}

void place_foot(const sim::RobotModel& m, int leg, const Vec2& ankle,
                double foot_angle, Pose& pose) {
  const double l1 = m.link_lengths[kThigh[leg]];
  const double l2 = m.link_lengths[kShank[leg]];
  Vec2 d = ankle - pose.root_pos;
  double r = d.norm();
  const double r_max = l1 + l2;
  const double r_min = std::abs(l1 - l2) + 1e-9;
  if (r > r_max) d *= r_max / r, r = r_max;
  if (r < r_min) {
    d = r > 0.0 ? Vec2(d * (r_min / r)) : Vec2(0.0, -r_min);
    r = r_min;
  }
  const double c = std::clamp((r * r - l1 * l1 - l2 * l2) / (2.0 * l1 * l2),
                              -1.0, 1.0);
  const double knee = -std::acos(c);
  const double thigh =
      std::atan2(d(1), d(0)) -
      std::atan2(l2 * std::sin(knee), l1 + l2 * std::cos(knee));
  const double shank = thigh + knee;
  pose.q(kThigh[leg]) =
      wrap_angle(thigh - pose.root_angle - m.link_rest_angles[kThigh[leg]]);
  pose.q(kShank[leg]) = wrap_angle(shank - thigh - m.link_rest_angles[kShank[leg]]);
  pose.q(kFoot[leg]) =
      wrap_angle(foot_angle - shank - m.link_rest_angles[kFoot[leg]]);
}

Pose stance_pose(const sim::RobotModel& m) {
  require_biped(m);
  Pose p;
  p.root_pos = Vec2(0.0, leg_length(m) * std::cos(kStanceTilt));
  p.q = Vec::Zero(m.n_joints());
  const Vec2 ankle = p.root_pos + stance_ankle(m);
  for (int leg = 0; leg < 2; ++leg) place_foot(m, leg, ankle, 0.0, p);
  return p;
}

MotionClip generate_clip(ClipKind kind, const GeneratorParams& params,
                         double fps, double duration_s, Rng& rng,
                         const sim::RobotModel& m) {
  require_biped(m);
  if (!(fps > 0.0) || !std::isfinite(duration_s))
    throw InvalidInput("generate_clip: fps must be > 0");
  const int n = static_cast<int>(std::floor(duration_s * fps + 1e-9));
  if (n < 2)
    throw InvalidInput("generate_clip: duration " + std::to_string(duration_s) +
                       " s at " + std::to_string(fps) +
                       " fps gives fewer than 2 frames");
  double amp = params.amplitude;
  double period = params.period > 0.0 ? params.period : default_period(kind);
  if (params.jitter > 0.0) {
    amp *= uniform(rng, 1.0 - params.jitter, 1.0 + params.jitter);
    period *= uniform(rng, 1.0 - 0.5 * params.jitter, 1.0 + 0.5 * params.jitter);
  }
  const double phase0 = params.random_phase ? uniform(rng, 0.0, 1.0) : 0.0;

  const Pose stance = stance_pose(m);
  const double h0 = stance.root_pos(1);
  const Vec2 rel = stance_ankle(m);
  const double two_pi = 2.0 * kPi;

  std::vector<Pose> poses;
  poses.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = i / fps;
    const double ph = t / period + phase0;
    Pose p = stance;
    Vec2 ankle[2] = {stance.root_pos + rel, stance.root_pos + rel};
    double foot_angle[2] = {0.0, 0.0};
    switch (kind) {
      case ClipKind::kWalk: {
        // Duty factor 0.6; feet half a cycle apart. During stance the foot is
        // planted while the hip advances; during swing it catches up along a
        // smoothstep in x with a raised-cosine lift.
        const double stride = 0.3 * amp;
        const double lift = 0.06 * amp;
        const double speed = stride / period;
        const double duty = 0.6;
        p.root_pos(0) = speed * (t + phase0 * period);
        p.root_pos(1) = h0 - 0.05 * amp - 0.01 * amp * (1.0 - std::cos(2.0 * two_pi * ph)) / 2.0;
        for (int leg = 0; leg < 2; ++leg) {
          const double s = frac(ph + 0.5 * leg);
          double dx;
          double dz = 0.0;
          if (s < duty) {
            dx = stride * (0.5 * duty - s);
          } else {
            const double u = (s - duty) / (1.0 - duty);
            const double world = stride * smoothstep(u);
            dx = world - stride * (0.5 * duty + (s - duty));
            dz = lift * (1.0 - std::cos(two_pi * u)) / 2.0;
          }
          ankle[leg] = Vec2(p.root_pos(0) + rel(0) + dx, dz);
        }
        break;
      }
      case ClipKind::kSquat: {
        const double s = (1.0 - std::cos(two_pi * ph)) / 2.0;
        p.root_pos(1) = h0 - 0.2 * amp * s;
        p.q(kTorso) = -0.4 * amp * s;
        break;
      }
      case ClipKind::kWave:
        p.q(kTorso) = 0.5 * amp * std::sin(two_pi * ph);
        break;
      case ClipKind::kKick: {
        const double b = std::pow(std::sin(kPi * frac(ph)), 2);
        p.root_pos(1) = h0 - 0.03 * amp * b;
        ankle[1] += Vec2(0.3 * amp * b, 0.2 * amp * b);
        foot_angle[1] = 0.3 * amp * b;
        break;
      }
      case ClipKind::kTurn:
        // Planar stand-in: the pelvis pitches while the torso stays upright
        // and the feet stay planted.
        p.root_angle = 0.25 * amp * std::sin(two_pi * ph);
        p.q(kTorso) = -p.root_angle;
        break;
    }
    for (int leg = 0; leg < 2; ++leg) place_foot(m, leg, ankle[leg], foot_angle[leg], p);
    p.q = m.clamp_to_limits(p.q);
    poses.push_back(std::move(p));
  }
  return build_clip(m, to_string(kind), fps, ClipSource::kSynthetic, poses);
}

}  // namespace wbt::motion
