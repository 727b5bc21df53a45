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

#ifndef WBT_EVAL_METRICS_HPP_
#define WBT_EVAL_METRICS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbt/common.hpp"
#include "wbt/eval/noise.hpp"
#include "wbt/eval/policy.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/sim/robot_model.hpp"

namespace wbt::eval {

// Executed motion, one entry per reached frame starting at frame 0.
struct EpisodeTrace {
  std::vector<Points2> keypoints;
  std::vector<Vec> q;
  std::vector<Vec> qdot;
  int size() const { return static_cast<int>(q.size()); }
  void push(const Points2& kp, const Vec& qi, const Vec& qdoti);
};

struct TrackingRow {
  std::string clip;
  std::uint64_t seed = 0;
  bool success = false;
  double mpkpe = 0.0;     // m, world frame
  double vel_dist = 0.0;  // rad/s
  double acc_dist = 0.0;  // rad/s^2
  std::string termination = "none";
  int frames = 0;  // frames reached, including frame 0
};

// MPKPE and Vel-Dist average over every reached frame; Acc-Dist compares
// central differences of joint velocity over interior reached frames and is
// 0 with fewer than three. Success and termination are left to the caller.
TrackingRow score_trace(const motion::MotionClip& clip,
                        const EpisodeTrace& trace);

// Starts from frame 0 and runs until the final frame or early termination.
// A diverged simulation is a failure with termination "diverged".
TrackingRow evaluate_clip(const sim::RobotModel& model, Policy& policy,
                          const motion::MotionClip& clip,
                          const NoiseSpec& noise, std::uint64_t seed);

// Kinematic playback of the clip itself.
TrackingRow replay_clip(const motion::MotionClip& clip);

struct Aggregate {
  int n_rows = 0;
  int n_success = 0;
  double sr = 0.0;  // percent
  double mpkpe_all = 0.0;
  double vel_all = 0.0;
  double acc_all = 0.0;
  // NaN when no row succeeded.
  double mpkpe_succ = 0.0;
  double vel_succ = 0.0;
  double acc_succ = 0.0;
};

// Exact means over all rows and over successful rows. Throws InvalidInput on
// an empty row set.
Aggregate aggregate(const std::vector<TrackingRow>& rows);

struct TrackingReport {
  std::string policy_id;
  int noise_level = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<TrackingRow> rows;
  Aggregate summary() const { return aggregate(rows); }
};

// One row per (seed, clip). Throws InvalidInput on an empty clip or seed set.
TrackingReport evaluate_suite(const sim::RobotModel& model, Policy& policy,
                              const std::vector<motion::MotionClip>& clips,
                              const NoiseSpec& noise,
                              const std::vector<std::uint64_t>& seeds);

nlohmann::json row_to_json(const TrackingRow& row);
// Throws nlohmann::json exceptions on missing fields.
TrackingRow row_from_json(const nlohmann::json& j);

// Header record then one record per row; doubles round-trip exactly.
std::string report_to_jsonl(const TrackingReport& report);
TrackingReport report_from_jsonl(const std::string& text);
void save_report(const TrackingReport& report,
                 const std::filesystem::path& path);
TrackingReport load_report(const std::filesystem::path& path);

}  // namespace wbt::eval

#endif  // WBT_EVAL_METRICS_HPP_
