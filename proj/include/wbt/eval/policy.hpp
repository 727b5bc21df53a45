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

#ifndef WBT_EVAL_POLICY_HPP_
#define WBT_EVAL_POLICY_HPP_

#include <string>

#include "wbt/common.hpp"
#include "wbt/eval/noise.hpp"
#include "wbt/motion/clip.hpp"
#include "wbt/sim/simulator.hpp"

namespace wbt::eval {

// A tracking controller. Policies may keep per-episode state (observation
// history, previous action) that reset() clears.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string id() const = 0;
  virtual void reset() = 0;
  // PD target for the control step that advances the reference from `frame`
  // to frame + 1. Observation noise is applied by the policy through
  // observe().
  virtual Vec act(const sim::SimState& state, const motion::MotionClip& clip,
                  int frame, const NoiseSpec& noise, Rng& rng) = 0;
};

// Commands a fixed joint target regardless of the reference.
class ConstantPolicy : public Policy {
 public:
  explicit ConstantPolicy(Vec target) : target_(std::move(target)) {}
  std::string id() const override { return "constant"; }
  void reset() override {}
  Vec act(const sim::SimState&, const motion::MotionClip&, int,
          const NoiseSpec&, Rng&) override {
    return target_;
  }

 private:
  Vec target_;
};

}  // namespace wbt::eval

#endif  // WBT_EVAL_POLICY_HPP_
