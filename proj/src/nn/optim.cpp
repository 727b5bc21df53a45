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

#include "wbt/nn/optim.hpp"

#include <cmath>

namespace wbt::nn {

AdamState make_adam_state(Eigen::Index n) {
  return {Vec::Zero(n), Vec::Zero(n), 0};
}

void adam_step(Vec& params, const Vec& grad, AdamState& s,
               const AdamHyper& h) {
  if (s.m.size() == 0 && s.v.size() == 0 && s.step == 0) s = make_adam_state(params.size());
  if (grad.size() != params.size() || s.m.size() != params.size() ||
      s.v.size() != params.size())
    throw InvalidInput("adam_step: shapes disagree");
  ++s.step;
  s.m = h.beta1 * s.m + (1.0 - h.beta1) * grad;
  s.v = h.beta2 * s.v + (1.0 - h.beta2) * grad.cwiseAbs2();
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(s.step));
  params.array() -= h.lr * (s.m.array() / c1) / ((s.v.array() / c2).sqrt() + h.eps);
}

double clip_grad_norm(Vec& grad, double max_norm) {
  const double n = grad.norm();
  if (n > max_norm && n > 0.0) grad *= max_norm / n;
  return n;
}

RunningNormalizer RunningNormalizer::make(Eigen::Index dim) {
  RunningNormalizer r;
  r.mean = Vec::Zero(dim);
  r.var = Vec::Ones(dim);
  r.count = 0.0;
  return r;
}

void RunningNormalizer::update(const Mat& batch) {
  if (batch.cols() == 0) return;
  if (batch.rows() != mean.size())
    throw InvalidInput("normalizer: dimension mismatch");
  const double n = static_cast<double>(batch.cols());
  const Vec bmean = batch.rowwise().mean();
  const Vec bvar = (batch.colwise() - bmean).array().square().rowwise().sum() / n;
  if (count == 0.0) {
    mean = bmean;
    var = bvar;
    count = n;
    return;
  }
  const double total = count + n;
  const Vec delta = bmean - mean;
  mean += delta * (n / total);
  var = (var * count + bvar * n + delta.cwiseAbs2() * (count * n / total)) / total;
  count = total;
}

Mat RunningNormalizer::normalize(const Mat& x) const {
  if (x.rows() != mean.size())
    throw InvalidInput("normalizer: dimension mismatch");
  const Eigen::ArrayXd inv = (var.array() + 1e-8).rsqrt();
  Mat out = (x.colwise() - mean);
  out.array().colwise() *= inv;
  return out.cwiseMax(-clip).cwiseMin(clip);
}

Vec RunningNormalizer::normalize(const Vec& x) const {
  return normalize(Mat(x)).col(0);
}

}  // namespace wbt::nn
