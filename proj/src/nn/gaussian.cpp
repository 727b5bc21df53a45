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

#include "wbt/nn/gaussian.hpp"

#include <cmath>

namespace wbt::nn {

Vec clamp_log_std(const Vec& log_std) {
  if (log_std.array().isNaN().any()) throw InvalidInput("log_std is NaN");
  return log_std.cwiseMax(kLogStdMin).cwiseMin(kLogStdMax);
}

Vec clamp_log_std_mask(const Vec& raw) {
  return ((raw.array() >= kLogStdMin) && (raw.array() <= kLogStdMax))
      .cast<double>()
      .matrix();
}

GaussianHead head_from_output(const Vec& out) {
  if (out.size() % 2 != 0)
    throw InvalidInput("head_from_output: output size must be even");
  const auto d = out.size() / 2;
  GaussianHead h;
  h.mean = out.head(d);
  h.log_std = clamp_log_std(out.tail(d));
  h.state_dependent = true;
  return h;
}

double log_prob(const GaussianHead& head, const Vec& x) {
  if (x.size() != head.dim()) throw InvalidInput("log_prob: size mismatch");
  const Vec z = ((x - head.mean).array() / head.log_std.array().exp()).matrix();
  return -0.5 * z.squaredNorm() - head.log_std.sum() -
         0.5 * head.dim() * std::log(2.0 * kPi);
}

double entropy(const GaussianHead& head) {
  return head.log_std.sum() + 0.5 * head.dim() * (1.0 + std::log(2.0 * kPi));
}

Sample sample_reparam(const GaussianHead& head, Rng& rng) {
  Sample s;
  s.noise = normal_vec(rng, head.dim());
  s.value = head.mean + (head.log_std.array().exp() * s.noise.array()).matrix();
  return s;
}

double kl_diag_gauss(const Vec& mu1, const Vec& sigma1, const Vec& mu2,
                     const Vec& sigma2) {
  if (mu1.size() != sigma1.size() || mu2.size() != sigma2.size() ||
      mu1.size() != mu2.size())
    throw InvalidInput("kl_diag_gauss: size mismatch");
  if ((sigma1.array() <= 0.0).any() || (sigma2.array() <= 0.0).any() ||
      sigma1.array().isNaN().any() || sigma2.array().isNaN().any())
    throw InvalidInput("kl_diag_gauss: sigma must be > 0");
  const auto v1 = sigma1.array().square();
  const auto v2 = sigma2.array().square();
  return ((sigma2.array() / sigma1.array()).log() +
          (v1 + (mu1 - mu2).array().square()) / (2.0 * v2) - 0.5)
      .sum();
}

double kl_diag_gauss_log(const Vec& mu1, const Vec& log_std1, const Vec& mu2,
                         const Vec& log_std2, KlGrad* grad) {
  if (mu1.size() != log_std1.size() || mu2.size() != log_std2.size() ||
      mu1.size() != mu2.size())
    throw InvalidInput("kl_diag_gauss_log: size mismatch");
  const Eigen::ArrayXd ratio = (2.0 * (log_std1 - log_std2)).array().exp();
  const Eigen::ArrayXd diff = (mu1 - mu2).array();
  const Eigen::ArrayXd inv_v2 = (-2.0 * log_std2).array().exp();
  const double kl =
      ((log_std2 - log_std1).array() + 0.5 * (ratio + diff.square() * inv_v2) - 0.5)
          .sum();
  if (grad != nullptr) {
    grad->mu1 = (diff * inv_v2).matrix();
    grad->mu2 = -grad->mu1;
    grad->log_std1 = (ratio - 1.0).matrix();
    grad->log_std2 = (1.0 - ratio - diff.square() * inv_v2).matrix();
  }
  return kl;
}

}  // namespace wbt::nn
