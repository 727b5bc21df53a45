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

#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "wbt/motion/clip.hpp"
#include "wbt/motion/curate.hpp"
#include "wbt/motion/generate.hpp"
#include "wbt/motion/retarget.hpp"
#include "wbt/sim/kinematics.hpp"

namespace wbt::motion {
namespace {

using sim::RobotModel;

MotionClip make(ClipKind kind, double duration = 2.0, double amplitude = 1.0) {
  Rng rng(7);
  GeneratorParams p;
  p.amplitude = amplitude;
  return generate_clip(kind, p, 50.0, duration, rng, sim::default_biped());
}

MotionClip standing(int frames) {
  const RobotModel m = sim::default_biped();
  return build_clip(m, "stand", 50.0, ClipSource::kSynthetic,
                    std::vector<Pose>(frames, stance_pose(m)));
}

std::vector<ClipKind> all_kinds() {
  return {ClipKind::kWalk, ClipKind::kSquat, ClipKind::kWave, ClipKind::kKick,
          ClipKind::kTurn};
}

TEST(ClipIo, RoundTripIsBitExact) {
  const MotionClip a = make(ClipKind::kWalk, 1.0);
  const auto path = std::filesystem::path(::testing::TempDir()) / "walk.clip";
  save_clip(a, path);
  const MotionClip b = load_clip(path);
  EXPECT_EQ(b.name, a.name);
  EXPECT_EQ(b.fps, a.fps);
  EXPECT_EQ(b.source, a.source);
  ASSERT_EQ(b.size(), a.size());
  for (int t = 0; t < a.size(); ++t) {
    EXPECT_EQ(b.frames[t].q, a.frames[t].q);
    EXPECT_EQ(b.frames[t].qdot, a.frames[t].qdot);
    EXPECT_EQ(b.frames[t].keypoints, a.frames[t].keypoints);
    EXPECT_EQ(b.frames[t].root_pos, a.frames[t].root_pos);
    EXPECT_EQ(b.frames[t].root_angle, a.frames[t].root_angle);
    EXPECT_EQ(b.frames[t].root_linvel, a.frames[t].root_linvel);
    EXPECT_EQ(b.frames[t].root_angvel, a.frames[t].root_angvel);
  }
}

TEST(ClipIo, InconsistentVelocitiesAreRejectedOnLoad) {
  MotionClip a = make(ClipKind::kSquat, 1.0);
  a.frames[10].qdot(2) += 0.5;
  const auto path = std::filesystem::path(::testing::TempDir()) / "bad.clip";
  save_clip(a, path);
  EXPECT_THROW(load_clip(path), InvalidInput);
  EXPECT_NO_THROW(load_clip(path, -1.0));
}

TEST(ClipIo, TruncatedFileIsRejected) {
  std::string text = clip_to_string(make(ClipKind::kWave, 0.5));
  text.resize(text.rfind('\n', text.size() - 2) + 1);
  EXPECT_THROW(clip_from_string(text), InvalidInput);
  EXPECT_THROW(clip_from_string("{\"hello\": 1}\n"), InvalidInput);
}

TEST(ClipSourceNames, RoundTrip) {
  for (auto s : {ClipSource::kSynthetic, ClipSource::kRetargeted,
                 ClipSource::kExternal})
    EXPECT_EQ(clip_source_from_string(to_string(s)), s);
  EXPECT_THROW(clip_source_from_string("mocap"), InvalidInput);
}

TEST(PlaceFoot, ReachesTargetWithFootFlat) {
  const RobotModel m = sim::default_biped();
  Pose p = stance_pose(m);
  p.root_pos = Vec2(0.3, 0.7);
  p.root_angle = 0.1;
  const Vec2 target(0.35, 0.05);
  place_foot(m, 1, target, 0.2, p);
  const auto poses = sim::link_poses<double>(m, p.root_pos, p.root_angle, p.q);
  EXPECT_NEAR((poses.distal[4] - target).norm(), 0.0, 1e-12);
  EXPECT_NEAR(poses.angle[6], 0.2, 1e-12);
  EXPECT_LT(p.q(3), 0.0);  // knee bends forward
}

TEST(Generate, StanceHasFeetFlatOnGround) {
  const RobotModel m = sim::default_biped();
  const Pose p = stance_pose(m);
  const Points2 kp = sim::forward_kinematics(m, p.root_pos, p.root_angle, p.q);
  for (int k : {4, 5, 6, 7}) EXPECT_NEAR(kp(1, k), 0.0, 1e-12);
  EXPECT_NEAR(kp(0, 4), -0.8 * std::sin(0.06), 1e-12);
}

TEST(Generate, ZeroAmplitudeSquatIsStill) {
  const MotionClip c = make(ClipKind::kSquat, 2.0, 0.0);
  const Pose p = stance_pose(sim::default_biped());
  for (const auto& f : c.frames) {
    EXPECT_NEAR((f.q - p.q).norm(), 0.0, 1e-12);
    EXPECT_EQ(f.qdot.norm(), 0.0);
    EXPECT_EQ(f.root_linvel.norm(), 0.0);
    EXPECT_EQ(f.root_angvel, 0.0);
  }
}

TEST(Generate, WalkIsPeriodicInJointSpace) {
  const double period = 0.8;
  Rng rng(1);
  GeneratorParams p;
  p.period = period;
  const MotionClip c =
      generate_clip(ClipKind::kWalk, p, 50.0, 4.0, rng, sim::default_biped());
  const int shift = static_cast<int>(std::lround(period * 50.0));
  double worst = 0.0;
  for (int i = 0; i + shift < c.size(); ++i)
    worst = std::max(worst, (c.frames[i].q - c.frames[i + shift].q).cwiseAbs().maxCoeff());
  EXPECT_LT(worst, 1e-6);
  EXPECT_GT(c.frames.back().root_pos(0), 1.0);  // actually walks
}

TEST(Generate, TooShortDurationFails) {
  Rng rng(1);
  EXPECT_THROW(generate_clip(ClipKind::kWalk, {}, 50.0, 0.01, rng,
                             sim::default_biped()),
               InvalidInput);
}

TEST(Generate, UnknownKindFails) {
  EXPECT_THROW(clip_kind_from_string("cartwheel"), InvalidInput);
  for (auto k : all_kinds()) EXPECT_EQ(clip_kind_from_string(to_string(k)), k);
}

TEST(Generate, VelocitiesMatchCentralDifferences) {
  for (auto k : all_kinds()) {
    const MotionClip c = make(k, 3.0);
    EXPECT_LT(velocity_consistency_error(c), 1e-8) << to_string(k);
  }
}

TEST(Generate, JointsStayWithinLimitsAndKeypointsMatchFk) {
  const RobotModel m = sim::default_biped();
  for (auto k : all_kinds()) {
    const MotionClip c = make(k, 3.0);
    for (const auto& f : c.frames) {
      EXPECT_TRUE(((f.q - m.joint_lo()).array() >= 0.0).all()) << to_string(k);
      EXPECT_TRUE(((m.joint_hi() - f.q).array() >= 0.0).all()) << to_string(k);
      const Points2 kp = sim::forward_kinematics(m, f.root_pos, f.root_angle, f.q);
      EXPECT_EQ(kp, f.keypoints);
    }
  }
}

TEST(Generate, JitterIsSeeded) {
  GeneratorParams p;
  p.jitter = 0.2;
  p.random_phase = true;
  Rng a(5), b(5), c(6);
  const RobotModel m = sim::default_biped();
  const MotionClip x = generate_clip(ClipKind::kKick, p, 50.0, 1.0, a, m);
  const MotionClip y = generate_clip(ClipKind::kKick, p, 50.0, 1.0, b, m);
  const MotionClip z = generate_clip(ClipKind::kKick, p, 50.0, 1.0, c, m);
  EXPECT_EQ(x.frames[20].q, y.frames[20].q);
  EXPECT_NE(x.frames[20].q, z.frames[20].q);
}

TEST(Curate, NineFramesFailMinFrames) {
  const auto r = curate({standing(9)}, CurationPolicy{});
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].rule, CurationRule::kMinFrames);
  EXPECT_TRUE(r.kept.empty());
}

TEST(Curate, FastFramePairFailsJointVelocity) {
  CurationPolicy policy;
  MotionClip c = standing(100);
  // One frame pair with twice the velocity cap.
  const double jump = 2.0 * policy.max_joint_vel / c.fps;
  for (int t = 50; t < c.size(); ++t) c.frames[t].q(0) += jump;
  fill_velocities(c);
  const auto r = curate({c}, policy);
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].rule, CurationRule::kMaxJointVel);
  EXPECT_EQ(r.rejected[0].frame, 49);
  EXPECT_NEAR(r.rejected[0].value, 2.0 * policy.max_joint_vel, 1e-9);
}

TEST(Curate, StandingClipIsKept) {
  const auto r = curate({standing(100)}, CurationPolicy{});
  EXPECT_EQ(r.kept.size(), 1u);
  EXPECT_TRUE(r.rejected.empty());
  EXPECT_TRUE(rejection_report(r.rejected).empty());
}

TEST(Curate, BadPolicyIsAConfigError) {
  CurationPolicy p;
  p.max_joint_acc = 0.0;
  EXPECT_THROW(curate({}, p), ConfigError);
}

// Independent re-check of the thresholds for the soundness property.
bool passes(const MotionClip& c, const CurationPolicy& p) {
  if (c.size() < p.min_frames) return false;
  for (int t = 1; t < c.size(); ++t) {
    for (int j = 0; j < c.n_joints(); ++j) {
      if (std::abs(c.frames[t].q(j) - c.frames[t - 1].q(j)) * c.fps > p.max_joint_vel)
        return false;
      if (t + 1 < c.size() &&
          std::abs(c.frames[t + 1].q(j) - 2 * c.frames[t].q(j) + c.frames[t - 1].q(j)) *
                  c.fps * c.fps > p.max_joint_acc)
        return false;
    }
    const Vec2 dp = c.frames[t].root_pos - c.frames[t - 1].root_pos;
    if (std::hypot(dp(0), dp(1)) * c.fps > p.max_root_speed) return false;
  }
  return true;
}

TEST(Curate, KeptClipsPassIndependentRecheck) {
  Rng rng(11);
  std::vector<MotionClip> clips;
  const RobotModel m = sim::default_biped();
  for (int i = 0; i < 40; ++i) {
    GeneratorParams p;
    p.amplitude = uniform(rng, 0.0, 3.0);
    p.period = uniform(rng, 0.3, 2.0);
    const auto kind = all_kinds()[i % 5];
    clips.push_back(generate_clip(kind, p, 50.0, uniform(rng, 0.1, 2.0), rng, m));
  }
  CurationPolicy policy;
  const auto r = curate(clips, policy);
  EXPECT_EQ(r.kept.size() + r.rejected.size(), clips.size());
  EXPECT_FALSE(r.kept.empty());
  EXPECT_FALSE(r.rejected.empty());
  for (const auto& c : r.kept) EXPECT_TRUE(passes(c, policy));
}

SourceSkeleton robot_skeleton() {
  return skeleton_from_robot(sim::default_biped(), biped_scale_groups(), 4);
}

TEST(FitShape, IdenticalSkeletonGivesUnitScales) {
  const ShapeFit fit = fit_shape(robot_skeleton(), sim::default_biped());
  EXPECT_NEAR((fit.beta - Vec::Ones(4)).norm(), 0.0, 1e-12);
  EXPECT_NEAR(fit.objective, 0.0, 1e-20);
  EXPECT_TRUE(fit.converged);
}

TEST(FitShape, DoubleSizeSourceGivesHalfScales) {
  for (auto corr : {robot_skeleton().correspondence, default_correspondence()}) {
    SourceSkeleton s = robot_skeleton();
    s.correspondence = corr;
    for (auto& o : s.rest_offsets) o *= 2.0;
    const ShapeFit fit = fit_shape(s, sim::default_biped());
    for (int g = 0; g < 4; ++g) EXPECT_NEAR(fit.beta(g), 0.5, 1e-3);
    EXPECT_LE(fit.objective, fit.initial_objective);
  }
}

TEST(FitShape, EmptyCorrespondenceFails) {
  SourceSkeleton s = robot_skeleton();
  s.correspondence.clear();
  EXPECT_THROW(fit_shape(s, sim::default_biped()), InvalidInput);
}

TEST(FitShape, NonInjectiveCorrespondenceFails) {
  SourceSkeleton s = robot_skeleton();
  s.correspondence.push_back({1, 3});
  EXPECT_THROW(fit_shape(s, sim::default_biped()), InvalidInput);
}

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x,
                double h) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

TEST(FitShape, AnalyticGradientMatchesFiniteDifferences) {
  SourceSkeleton s = robot_skeleton();
  s.correspondence = default_correspondence();
  const Vec scales = (Vec(4) << 1.3, 0.9, 1.1, 1.4).finished();
  s.rest_offsets.clear();
  for (int i = 0; i < 7; ++i)
    s.rest_offsets.emplace_back(sim::default_biped().link_lengths[i] *
                                    scales(s.scale_group[i]), 0.0);
  const RobotModel m = sim::default_biped();
  const Vec beta = (Vec(4) << 0.7, 1.2, 0.95, 1.5).finished();
  Vec g;
  shape_objective(s, m, beta, &g);
  const Vec fd = fd_gradient(
      [&](const Vec& b) { return shape_objective(s, m, b); }, beta, 1e-6);
  EXPECT_LT((g - fd).norm(), 1e-6 * std::max(1.0, g.norm()));

  const ShapeFit fit = fit_shape(s, m);
  const Vec fd_at_fit = fd_gradient(
      [&](const Vec& b) { return shape_objective(s, m, b); }, fit.beta, 1e-6);
  EXPECT_LT(fd_at_fit.norm(), 1e-4);
  for (int gi = 0; gi < 4; ++gi) EXPECT_NEAR(fit.beta(gi), 1.0 / scales(gi), 1e-4);
}

TEST(Retarget, RoundTripRecoversJointAngles) {
  const RobotModel m = sim::default_biped();
  const MotionClip robot_clip = make(ClipKind::kWalk, 1.0);
  const SourceSkeleton s = robot_skeleton();
  const MotionClip src = to_source_clip(robot_clip, s);
  RetargetWeights w;
  w.w_smooth = 0.0;
  const RetargetResult r = retarget_sequence(s, Vec::Ones(4), src, m, w);
  EXPECT_TRUE(r.converged);
  double sq = 0.0;
  int count = 0;
  for (int t = 0; t < robot_clip.size(); ++t) {
    sq += (r.clip.frames[t].q - robot_clip.frames[t].q).squaredNorm();
    count += m.n_joints();
  }
  EXPECT_LT(std::sqrt(sq / count), 1e-4);
  EXPECT_EQ(r.clip.source, ClipSource::kRetargeted);
  EXPECT_LT(velocity_consistency_error(r.clip), 1e-8);
}

TEST(Retarget, ObjectiveNeverIncreases) {
  const RobotModel m = sim::default_biped();
  SourceSkeleton s = robot_skeleton();
  s.correspondence = default_correspondence();
  for (auto& o : s.rest_offsets) o *= 1.2;
  const ShapeFit fit = fit_shape(s, m);
  const MotionClip src = to_source_clip(make(ClipKind::kKick, 1.0), s);
  const RetargetResult r = retarget_sequence(s, fit.beta, src, m);
  ASSERT_GE(r.objective_history.size(), 2u);
  for (std::size_t i = 1; i < r.objective_history.size(); ++i)
    EXPECT_LE(r.objective_history[i], r.objective_history[i - 1]);
  for (const auto& f : r.clip.frames) {
    EXPECT_TRUE(((f.q - m.joint_lo()).array() >= 0.0).all());
    EXPECT_TRUE(((m.joint_hi() - f.q).array() >= 0.0).all());
  }
}

TEST(Retarget, HeavySmoothingCollapsesToConstantPose) {
  const RobotModel m = sim::default_biped();
  const SourceSkeleton s = robot_skeleton();
  const MotionClip src = to_source_clip(make(ClipKind::kSquat, 1.0), s);
  RetargetWeights w;
  w.w_smooth = 1e8;
  const RetargetResult r = retarget_sequence(s, Vec::Ones(4), src, m, w);
  for (int t = 0; t + 1 < r.clip.size(); ++t)
    EXPECT_LT((r.clip.frames[t + 1].q - r.clip.frames[t].q).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Retarget, SingleFrameIsAPerFrameFit) {
  const RobotModel m = sim::default_biped();
  const SourceSkeleton s = robot_skeleton();
  MotionClip src = to_source_clip(make(ClipKind::kWave, 1.0), s);
  src.frames.resize(1);
  const RetargetResult r = retarget_sequence(s, Vec::Ones(4), src, m);
  ASSERT_EQ(r.clip.size(), 1);
  EXPECT_LT((r.clip.frames[0].q - make(ClipKind::kWave, 1.0).frames[0].q).norm(), 1e-5);
}

TEST(Retarget, EmptySourceFails) {
  const RobotModel m = sim::default_biped();
  MotionClip src;
  EXPECT_THROW(retarget_sequence(robot_skeleton(), Vec::Ones(4), src, m),
               InvalidInput);
}

TEST(Retarget, NonFiniteSourceRaisesOptimizationError) {
  const RobotModel m = sim::default_biped();
  const SourceSkeleton s = robot_skeleton();
  MotionClip src = to_source_clip(make(ClipKind::kWave, 0.2), s);
  src.frames[3].root_pos(0) = std::numeric_limits<double>::quiet_NaN();
  try {
    retarget_sequence(s, Vec::Ones(4), src, m);
    FAIL() << "expected OptimizationError";
  } catch (const OptimizationError& e) {
    EXPECT_EQ(e.iteration(), 0);
  }
}

TEST(Retarget, ObjectiveGradientMatchesFiniteDifferences) {
  const RobotModel m = sim::default_biped();
  SourceSkeleton s = robot_skeleton();
  s.correspondence = default_correspondence();
  const MotionClip src = to_source_clip(make(ClipKind::kWalk, 0.1), s);
  RetargetWeights w;
  w.w_smooth = 0.3;
  const RetargetProblem p = make_retarget_problem(s, Vec::Ones(4), src, m, w);
  Rng rng(3);
  Vec x(p.n_frames() * p.frame_dim());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = uniform(rng, -2.5, 2.5);
  Vec g;
  retarget_objective(p, x, &g);
  const Vec fd = fd_gradient([&](const Vec& v) { return retarget_objective(p, v); },
                             x, 1e-6);
  EXPECT_LT((g - fd).norm() / g.norm(), 1e-6);
}

}  // namespace
}  // namespace wbt::motion
