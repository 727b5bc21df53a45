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

#include "wbt/motion/retarget.hpp"

#include <Eigen/Sparse>

#include "wbt/sim/kinematics.hpp"

namespace wbt::motion {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;

// Rest-pose point positions as a linear map of beta: point j = A[j] * beta.
std::vector<Eigen::Matrix<double, 2, Eigen::Dynamic>> rest_point_maps(
    const SourceSkeleton& skel) {
  const int n = skel.n_source_joints();
  std::vector<Eigen::Matrix<double, 2, Eigen::Dynamic>> maps(
      n + 1, Eigen::Matrix<double, 2, Eigen::Dynamic>::Zero(2, skel.n_scales));
  std::vector<double> angle(n);
  for (int i = 0; i < n; ++i) {
    const int p = skel.parents[i];
    angle[i] = (p < 0 ? 0.0 : angle[p]) + skel.rest_angles[i];
    maps[i + 1] = maps[p + 1];
    maps[i + 1].col(skel.scale_group[i]) += rot2(angle[i]) * skel.rest_offsets[i];
  }
  return maps;
}

}  // namespace

void SourceSkeleton::validate() const {
  const int n = n_source_joints();
  if (n == 0) throw InvalidInput("source skeleton has no nodes");
  if (static_cast<int>(rest_offsets.size()) != n ||
      static_cast<int>(rest_angles.size()) != n ||
      static_cast<int>(scale_group.size()) != n)
    throw InvalidInput("source skeleton: field sizes disagree");
  if (n_scales <= 0) throw InvalidInput("source skeleton: n_scales must be > 0");
  for (int i = 0; i < n; ++i) {
    if (parents[i] < -1 || parents[i] >= i)
      throw InvalidInput("source skeleton: node " + std::to_string(i) +
                         " must have a parent before it");
    if (scale_group[i] < 0 || scale_group[i] >= n_scales)
      throw InvalidInput("source skeleton: bad scale group");
  }
  std::vector<bool> used_src(n + 1, false);
  std::vector<int> used_dst;
  for (const auto& [s, d] : correspondence) {
    if (s < 0 || s > n) throw InvalidInput("source skeleton: bad source point");
    if (used_src[s] ||
        std::find(used_dst.begin(), used_dst.end(), d) != used_dst.end())
      throw InvalidInput("source skeleton: correspondence is not injective");
    used_src[s] = true;
    used_dst.push_back(d);
  }
}

std::vector<int> biped_scale_groups() { return {0, 1, 1, 2, 2, 3, 3}; }

std::vector<std::pair<int, int>> default_correspondence() {
  return {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {6, 6}, {7, 7}};
}

SourceSkeleton skeleton_from_robot(const sim::RobotModel& robot,
                                   const std::vector<int>& scale_group,
                                   int n_scales) {
  const int n = robot.n_links();
  if (static_cast<int>(scale_group.size()) != n)
    throw InvalidInput("skeleton_from_robot: one scale group per link");
  SourceSkeleton s;
  s.parents = robot.link_parents;
  s.rest_angles = robot.link_rest_angles;
  s.scale_group = scale_group;
  s.n_scales = n_scales;
  for (int i = 0; i < n; ++i) s.rest_offsets.emplace_back(robot.link_lengths[i], 0.0);
  for (int k = 0; k < robot.n_keypoints(); ++k) {
    const int src = k == 0 ? 0 : robot.keypoint_links[k - 1] + 1;
    s.correspondence.emplace_back(src, k);
  }
  s.validate();
  return s;
}

sim::RobotModel scale_limbs(const sim::RobotModel& robot,
                            const std::vector<int>& scale_group,
                            const Vec& scales) {
  sim::RobotModel out = robot;
  for (int i = 0; i < robot.n_links(); ++i) {
    const double s = scales(scale_group.at(i));
    out.link_lengths[i] *= s;
    out.link_coms[i] *= s;
  }
  return out;
}

Points2 source_points(const SourceSkeleton& skel, const Vec& beta,
                      const Vec2& root_pos, double root_angle,
                      const Vec& angles) {
  const int n = skel.n_source_joints();
  if (angles.size() != n)
    throw InvalidInput("source_points: expected " + std::to_string(n) +
                       " node angles");
  if (beta.size() != skel.n_scales)
    throw InvalidInput("source_points: beta has the wrong size");
  Points2 pts(2, n + 1);
  pts.col(0) = root_pos;
  std::vector<double> a(n);
  for (int i = 0; i < n; ++i) {
    const int p = skel.parents[i];
    a[i] = (p < 0 ? root_angle : a[p]) + angles(i);
    pts.col(i + 1) = pts.col(p + 1) + beta(skel.scale_group[i]) *
                                          (rot2(a[i]) * skel.rest_offsets[i]);
  }
  return pts;
}

MotionClip to_source_clip(const MotionClip& robot_clip,
                          const SourceSkeleton& skel) {
  const int n = skel.n_source_joints();
  if (robot_clip.n_joints() != n)
    throw InvalidInput("to_source_clip: skeleton does not mirror the clip");
  const Vec rest = Eigen::Map<const Vec>(skel.rest_angles.data(), n);
  const Vec ones = Vec::Ones(skel.n_scales);
  MotionClip out = robot_clip;
  out.source = ClipSource::kExternal;
  for (auto& f : out.frames) {
    f.q += rest;
    f.keypoints = source_points(skel, ones, f.root_pos, f.root_angle, f.q);
  }
  return out;
}

double shape_objective(const SourceSkeleton& skel, const sim::RobotModel& robot,
                       const Vec& beta, Vec* grad) {
  const auto maps = rest_point_maps(skel);
  const Points2 target = sim::forward_kinematics(
      robot, Vec2::Zero(), 0.0, Vec::Zero(robot.n_joints()));
  double f = 0.0;
  if (grad != nullptr) *grad = Vec::Zero(skel.n_scales);
  for (const auto& [s, k] : skel.correspondence) {
    if (k < 0 || k >= target.cols())
      throw InvalidInput("correspondence names robot keypoint " +
                         std::to_string(k) + " which does not exist");
    const Vec2 e = maps[s] * beta - target.col(k);
    f += e.squaredNorm();
    if (grad != nullptr) *grad += 2.0 * maps[s].transpose() * e;
  }
  return f;
}

ShapeFit fit_shape(const SourceSkeleton& skel, const sim::RobotModel& robot,
                   const OptimizerOptions& options) {
  skel.validate();
  if (skel.correspondence.empty())
    throw InvalidInput("fit_shape: empty correspondence");
  ShapeFit fit;
  fit.beta = Vec::Ones(skel.n_scales);
  Vec g;
  double f = shape_objective(skel, robot, fit.beta, &g);
  fit.initial_objective = f;
  double step = 1.0;
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (g.norm() < options.grad_tol) {
      fit.converged = true;
      break;
    }
    const double gg = g.squaredNorm();
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h) {
      const Vec trial = fit.beta - step * g;
      Vec g_trial;
      const double f_trial = shape_objective(skel, robot, trial, &g_trial);
      if (f_trial <= f - kArmijo * step * gg) {
        fit.beta = trial;
        f = f_trial;
        g = g_trial;
        accepted = true;
        step *= 2.0;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  fit.iterations = it;
  fit.objective = f;
  fit.grad_norm = g.norm();
  fit.converged = fit.converged || fit.grad_norm < options.grad_tol;
  return fit;
}

RetargetProblem make_retarget_problem(const SourceSkeleton& skel,
                                      const Vec& beta,
                                      const MotionClip& source,
                                      const sim::RobotModel& robot,
                                      const RetargetWeights& weights) {
  skel.validate();
  if (source.frames.empty())
    throw InvalidInput("retarget_sequence: source motion is empty");
  if (skel.correspondence.empty())
    throw InvalidInput("retarget_sequence: empty correspondence");
  RetargetProblem p;
  p.robot = &robot;
  p.weights = weights;
  for (const auto& [s, k] : skel.correspondence) {
    if (k < 0 || k >= robot.n_keypoints())
      throw InvalidInput("correspondence names robot keypoint " +
                         std::to_string(k) + " which does not exist");
    p.robot_keypoints.push_back(k);
  }
  for (const auto& f : source.frames) {
    const Points2 pts =
        source_points(skel, beta, f.root_pos, f.root_angle, f.q);
    Points2 tgt(2, static_cast<Eigen::Index>(skel.correspondence.size()));
    for (std::size_t c = 0; c < skel.correspondence.size(); ++c)
      tgt.col(static_cast<Eigen::Index>(c)) = pts.col(skel.correspondence[c].first);
    p.targets.push_back(std::move(tgt));
    p.root_angles.push_back(f.root_angle);
  }
  return p;
}

double retarget_objective(const RetargetProblem& p, const Vec& x, Vec* grad) {
  const sim::RobotModel& robot = *p.robot;
  const int d = p.frame_dim();
  const int n = robot.n_joints();
  const int frames = p.n_frames();
  if (!x.allFinite()) {
    if (grad != nullptr) *grad = Vec::Constant(x.size(), std::nan(""));
    return std::nan("");
  }
  if (grad != nullptr) *grad = Vec::Zero(x.size());
  double f = 0.0;
  for (int t = 0; t < frames; ++t) {
    const auto xt = x.segment(t * d, d);
    const double da = xt(2) - p.root_angles[t];
    f += p.weights.w_root * da * da;
    if (grad != nullptr) (*grad)(t * d + 2) += 2.0 * p.weights.w_root * da;
    const Vec2 root = xt.head<2>();
    const Vec q = xt.tail(n);
    const Points2 kp = sim::forward_kinematics(robot, root, xt(2), q);
    Mat jac;
    if (grad != nullptr) jac = sim::keypoint_jacobian(robot, root, xt(2), q);
    for (std::size_t c = 0; c < p.robot_keypoints.size(); ++c) {
      const int k = p.robot_keypoints[c];
      const Vec2 e = kp.col(k) - p.targets[t].col(static_cast<Eigen::Index>(c));
      f += e.squaredNorm();
      if (grad != nullptr)
        grad->segment(t * d, d) += 2.0 * jac.middleRows(2 * k, 2).transpose() * e;
    }
    for (int j = 0; j < n; ++j) {
      const double lo = robot.joint_limits[j](0);
      const double hi = robot.joint_limits[j](1);
      const double v = q(j) < lo ? q(j) - lo : (q(j) > hi ? q(j) - hi : 0.0);
      f += p.weights.w_limit * v * v;
      if (grad != nullptr) (*grad)(t * d + 3 + j) += 2.0 * p.weights.w_limit * v;
    }
    if (t + 1 < frames) {
      const Vec dx = x.segment((t + 1) * d, d) - xt;
      f += p.weights.w_smooth * dx.squaredNorm();
      if (grad != nullptr) {
        grad->segment((t + 1) * d, d) += 2.0 * p.weights.w_smooth * dx;
        grad->segment(t * d, d) -= 2.0 * p.weights.w_smooth * dx;
      }
    }
  }
  return f;
}

namespace {

// Gauss-Newton matrix of the retarget objective: exact for the smoothness
// and active limit terms, J^T J for the keypoint term.
Eigen::SparseMatrix<double> gauss_newton(const RetargetProblem& p,
                                         const Vec& x) {
  const sim::RobotModel& robot = *p.robot;
  const int d = p.frame_dim();
  const int n = robot.n_joints();
  const int frames = p.n_frames();
  std::vector<Eigen::Triplet<double>> trip;
  const double ws = 2.0 * p.weights.w_smooth;
  for (int t = 0; t < frames; ++t) {
    const auto xt = x.segment(t * d, d);
    const Mat jac = sim::keypoint_jacobian(robot, xt.head<2>(), xt(2), xt.tail(n));
    Mat block = Mat::Identity(d, d) * 1e-9;
    block(2, 2) += 2.0 * p.weights.w_root;
    for (int k : p.robot_keypoints) {
      const auto jk = jac.middleRows(2 * k, 2);
      block += 2.0 * jk.transpose() * jk;
    }
    const int degree = (t > 0 ? 1 : 0) + (t + 1 < frames ? 1 : 0);
    block.diagonal().array() += ws * degree;
    for (int j = 0; j < n; ++j) {
      const double q = xt(3 + j);
      if (q < robot.joint_limits[j](0) || q > robot.joint_limits[j](1))
        block(3 + j, 3 + j) += 2.0 * p.weights.w_limit;
    }
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        if (block(r, c) != 0.0) trip.emplace_back(t * d + r, t * d + c, block(r, c));
    if (t + 1 < frames && ws > 0.0) {
      for (int r = 0; r < d; ++r) {
        trip.emplace_back(t * d + r, (t + 1) * d + r, -ws);
        trip.emplace_back((t + 1) * d + r, t * d + r, -ws);
      }
    }
  }
  Eigen::SparseMatrix<double> h(frames * d, frames * d);
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

}  // namespace

RetargetResult retarget_sequence(const SourceSkeleton& skel, const Vec& beta,
                                 const MotionClip& source,
                                 const sim::RobotModel& robot,
                                 const RetargetWeights& weights,
                                 const OptimizerOptions& options) {
  const RetargetProblem p =
      make_retarget_problem(skel, beta, source, robot, weights);
  const int d = p.frame_dim();
  const int n = robot.n_joints();
  const int frames = p.n_frames();

  // Start from the source root pose and mid-range joint angles.
  Vec x(frames * d);
  const Vec mid = 0.5 * (robot.joint_lo() + robot.joint_hi());
  for (int t = 0; t < frames; ++t) {
    const Frame& f = source.frames[t];
    x.segment(t * d, d) << f.root_pos, f.root_angle, mid;
  }

  RetargetResult result;
  Vec g;
  double f = retarget_objective(p, x, &g);
  if (!std::isfinite(f)) throw OptimizationError("retarget: objective is not finite", 0);
  result.objective_history.push_back(f);
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (g.norm() < options.grad_tol) {
      result.converged = true;
      break;
    }
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(gauss_newton(p, x));
    Vec dir = -solver.solve(g);
    double slope = g.dot(dir);
    if (solver.info() != Eigen::Success || !dir.allFinite() || slope >= 0.0) {
      dir = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h) {
      const Vec trial = x + step * dir;
      Vec g_trial;
      const double f_trial = retarget_objective(p, trial, &g_trial);
      if (!std::isfinite(f_trial))
        throw OptimizationError("retarget: objective diverged at iteration " +
                                    std::to_string(it),
                                it);
      if (f_trial <= f + kArmijo * step * slope) {
        x = trial;
        f = f_trial;
        g = g_trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    result.objective_history.push_back(f);
  }
  result.iterations = it;
  result.converged = result.converged || g.norm() < options.grad_tol;

  std::vector<Pose> poses(frames);
  for (int t = 0; t < frames; ++t) {
    const auto xt = x.segment(t * d, d);
    poses[t].root_pos = xt.head<2>();
    poses[t].root_angle = xt(2);
    poses[t].q = robot.clamp_to_limits(xt.tail(n));
  }
  result.clip =
      build_clip(robot, source.name, source.fps, ClipSource::kRetargeted, poses);
  return result;
}

}  // namespace wbt::motion
