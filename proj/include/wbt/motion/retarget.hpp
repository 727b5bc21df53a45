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

#ifndef WBT_MOTION_RETARGET_HPP_
#define WBT_MOTION_RETARGET_HPP_

#include <utility>
#include <vector>

#include "wbt/common.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/sim/robot_model.hpp"

namespace wbt::motion {

// Planar stick-figure source skeleton. Points are indexed with 0 for the
// root and 1 + i for the end of node i. Node i hangs off point
// parents[i] + 1 and ends at
//   point(parent) + beta[scale_group[i]] * R(a_i) * rest_offsets[i],
// where a_i = a_parent + angle_i and the root angle stands in for a_parent
// of top-level nodes. In an external clip, q holds the node angles.
struct SourceSkeleton {
  std::vector<int> parents;
  std::vector<Vec2> rest_offsets;
  std::vector<double> rest_angles;  // node angles of the rest pose
  std::vector<int> scale_group;
  int n_scales = 4;
  // (source point, robot keypoint) pairs.
  std::vector<std::pair<int, int>> correspondence;

  int n_source_joints() const { return static_cast<int>(parents.size()); }
  int n_points() const { return n_source_joints() + 1; }
  // Throws InvalidInput; an empty correspondence is allowed here.
  void validate() const;
};

// Limb groups of the biped: torso, thighs, shanks, feet.
std::vector<int> biped_scale_groups();

// Six pairs on the biped: pelvis, torso tip, knees, toes.
std::vector<std::pair<int, int>> default_correspondence();

// Skeleton with one node per robot link and identical proportions. The
// correspondence is the identity over all robot keypoints.
SourceSkeleton skeleton_from_robot(const sim::RobotModel& robot,
                                   const std::vector<int>& scale_group,
                                   int n_scales);

// Copy of `robot` with lengths and COM offsets of each limb group scaled.
sim::RobotModel scale_limbs(const sim::RobotModel& robot,
                            const std::vector<int>& scale_group,
                            const Vec& scales);

// Point positions of a source pose, 2 x n_points.
Points2 source_points(const SourceSkeleton& skel, const Vec& beta,
                      const Vec2& root_pos, double root_angle,
                      const Vec& angles);

// Reinterprets a robot clip as motion of `skel`, which must mirror the
// robot's links (as skeleton_from_robot builds it).
MotionClip to_source_clip(const MotionClip& robot_clip,
                          const SourceSkeleton& skel);

// Stage 1: scales minimizing the rest-pose distance between corresponding
// points, with both root frames at the origin.
struct ShapeFit {
  Vec beta;
  double objective = 0.0;
  double initial_objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct OptimizerOptions {
  int max_iterations = 2000;
  double grad_tol = 1e-5;
};

double shape_objective(const SourceSkeleton& skel, const sim::RobotModel& robot,
                       const Vec& beta, Vec* grad = nullptr);

// Gradient descent with Armijo backtracking from beta = 1. Throws
// InvalidInput for an empty correspondence.
ShapeFit fit_shape(const SourceSkeleton& skel, const sim::RobotModel& robot,
                   const OptimizerOptions& options = {});

// Stage 2.
struct RetargetWeights {
  double w_smooth = 0.1;
  double w_limit = 10.0;
  // Pulls the root angle toward the source root angle. Keypoints alone
  // leave it free: turning the root while counter-rotating every top-level
  // joint moves no keypoint.
  double w_root = 1.0;
};

struct RetargetProblem {
  const sim::RobotModel* robot = nullptr;
  std::vector<Points2> targets;  // per frame, one column per pair
  std::vector<double> root_angles;  // source root angle per frame
  std::vector<int> robot_keypoints;
  RetargetWeights weights;
  int n_frames() const { return static_cast<int>(targets.size()); }
  int frame_dim() const { return robot->n_dofs(); }
};

RetargetProblem make_retarget_problem(const SourceSkeleton& skel,
                                      const Vec& beta,
                                      const MotionClip& source,
                                      const sim::RobotModel& robot,
                                      const RetargetWeights& weights);

// x stacks (root_x, root_z, root_angle, q) per frame. Non-finite x gives NaN.
double retarget_objective(const RetargetProblem& problem, const Vec& x,
                          Vec* grad = nullptr);

class OptimizationError : public NumericalDivergence {
 public:
  OptimizationError(const std::string& what, int iteration)
      : NumericalDivergence(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

struct RetargetResult {
  MotionClip clip;
  std::vector<double> objective_history;  // one entry per accepted step
  int iterations = 0;
  bool converged = false;
};

// Descent along the gradient preconditioned by the Gauss-Newton matrix of
// the objective, with Armijo backtracking. Output q is clamped into the
// joint limits; velocities come from central differences.
RetargetResult retarget_sequence(const SourceSkeleton& skel, const Vec& beta,
                                 const MotionClip& source,
                                 const sim::RobotModel& robot,
                                 const RetargetWeights& weights = {},
                                 const OptimizerOptions& options = {});

}  // namespace wbt::motion

#endif  // WBT_MOTION_RETARGET_HPP_
