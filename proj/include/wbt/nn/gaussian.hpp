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

#ifndef WBT_NN_GAUSSIAN_HPP_
#define WBT_NN_GAUSSIAN_HPP_

#include "wbt/common.hpp"

namespace wbt::nn {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

// Diagonal Gaussian. log_std is either a free parameter shared across
// states or produced per state by a network.
struct GaussianHead {
  Vec mean;
  Vec log_std;
  bool state_dependent = false;

  int dim() const { return static_cast<int>(mean.size()); }
  Vec std() const { return log_std.array().exp().matrix(); }
};

// Clamps into [kLogStdMin, kLogStdMax]; NaN is rejected with InvalidInput.
Vec clamp_log_std(const Vec& log_std);
// 1 where clamp_log_std passes the gradient through, 0 where it clamps.
Vec clamp_log_std_mask(const Vec& raw);

// Splits a network output [mean; raw log_std] into a state-dependent head.
GaussianHead head_from_output(const Vec& out);

double log_prob(const GaussianHead& head, const Vec& x);
double entropy(const GaussianHead& head);

struct Sample {
  Vec value;
  Vec noise;  // standard normal draw; value = mean + std * noise
};

Sample sample_reparam(const GaussianHead& head, Rng& rng);

// KL(N(mu1, sigma1^2) || N(mu2, sigma2^2)) summed over dimensions, in nats.
// Throws InvalidInput for non-positive sigma or mismatched sizes.
double kl_diag_gauss(const Vec& mu1, const Vec& sigma1, const Vec& mu2,
                     const Vec& sigma2);

// Same divergence parameterized by log std, with gradients w.r.t. all four
// arguments (any of the outputs may be null).
struct KlGrad {
  Vec mu1, log_std1, mu2, log_std2;
};
double kl_diag_gauss_log(const Vec& mu1, const Vec& log_std1, const Vec& mu2,
                         const Vec& log_std2, KlGrad* grad = nullptr);

}  // namespace wbt::nn

#endif  // WBT_NN_GAUSSIAN_HPP_
