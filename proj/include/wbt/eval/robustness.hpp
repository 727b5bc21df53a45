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

#ifndef WBT_EVAL_ROBUSTNESS_HPP_
#define WBT_EVAL_ROBUSTNESS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "wbt/eval/metrics.hpp"
#include "wbt/eval/noise.hpp"
#include "wbt/eval/policy.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/sim/robot_model.hpp"

namespace wbt::eval {

struct NamedPolicy {
  std::string id;
  Policy* policy = nullptr;
};

struct RobustnessRow {
  std::string policy_id;
  int level = 0;
  std::vector<TrackingRow> rows;
  Aggregate summary() const { return aggregate(rows); }
};

struct RobustnessTable {
  std::vector<RobustnessRow> rows;  // level-major, policies in input order
};

// Evaluates every policy at every observation-noise level on the same clips
// and seeds. Levels must be strictly increasing and non-negative.
RobustnessTable robustness_sweep(const sim::RobotModel& model,
                                 const std::vector<NamedPolicy>& policies,
                                 const std::vector<int>& levels,
                                 const std::vector<motion::MotionClip>& clips,
                                 const std::vector<std::uint64_t>& seeds);

// One block per noise level with SR and MPKPE of each policy.
std::string format_robustness(const RobustnessTable& table);

std::string robustness_to_jsonl(const RobustnessTable& table);
RobustnessTable robustness_from_jsonl(const std::string& text);

}  // namespace wbt::eval

#endif  // WBT_EVAL_ROBUSTNESS_HPP_
