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

#ifndef WBT_NN_OPTIM_HPP_
#define WBT_NN_OPTIM_HPP_

#include "wbt/common.hpp"

namespace wbt::nn {

struct AdamHyper {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Vec m;
  Vec v;
  long step = 0;
};

AdamState make_adam_state(Eigen::Index n);

// One bias-corrected Adam update of `params` in place. Throws InvalidInput
// when shapes disagree.
void adam_step(Vec& params, const Vec& grad, AdamState& state,
               const AdamHyper& hyper);

// Rescales `grad` so its Euclidean norm is at most max_norm; returns the
// norm before clipping.
double clip_grad_norm(Vec& grad, double max_norm);

// Running mean/variance of observation vectors, merged batch-wise with
// Chan's parallel update.
struct RunningNormalizer {
  Vec mean;
  Vec var;
  double count = 0.0;
  double clip = 10.0;

  static RunningNormalizer make(Eigen::Index dim);
  // Columns are samples.
  void update(const Mat& batch);
  Mat normalize(const Mat& x) const;
  Vec normalize(const Vec& x) const;
};

}  // namespace wbt::nn

#endif  // WBT_NN_OPTIM_HPP_
