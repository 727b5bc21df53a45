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
#include "wbt/nn/mlp.hpp"

#include <Eigen/QR>

namespace wbt::nn {

namespace {

using ConstMap = Eigen::Map<const Mat>;

Mat activate(Activation a, const Mat& z) {
  if (a == Activation::kTanh) return z.array().tanh().matrix();
  return (z.array() > 0.0).select(z.array(), z.array().exp() - 1.0).matrix();
}

// Derivative expressed through the activation output y.
Mat activation_grad(Activation a, const Mat& z, const Mat& y) {
  if (a == Activation::kTanh) return (1.0 - y.array().square()).matrix();
  return (z.array() > 0.0).select(Mat::Ones(z.rows(), z.cols()).array(), y.array() + 1.0).matrix();
}

Mat orthogonal(Rng& rng, int rows, int cols, double gain) {
  const int big = std::max(rows, cols);
  const int small = std::min(rows, cols);
  Mat a(big, small);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = normal(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(big, small);
  const Mat r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
  for (int j = 0; j < small; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return gain * (rows >= cols ? q : Mat(q.transpose()));
}

}  // namespace

const char* to_string(Activation a) {
  return a == Activation::kTanh ? "tanh" : "elu";
}

const char* to_string(Init i) {
  return i == Init::kOrthogonal ? "orthogonal" : "small_uniform";
}

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::kTanh;
  if (s == "elu") return Activation::kElu;
  throw InvalidInput("unknown activation '" + s + "'");
}

Init init_from_string(const std::string& s) {
  if (s == "orthogonal") return Init::kOrthogonal;
  if (s == "small_uniform") return Init::kSmallUniform;
  throw InvalidInput("unknown init '" + s + "'");
}

int MlpSpec::n_params() const {
  int n = 0;
  for (int l = 0; l < n_layers(); ++l)
    n += layer_sizes[l + 1] * (layer_sizes[l] + 1);
  return n;
}

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2)
    throw InvalidInput("mlp: need at least input and output sizes");
  for (int s : layer_sizes)
    if (s <= 0) throw InvalidInput("mlp: layer sizes must be > 0");
}

Mlp make_mlp(const MlpSpec& spec) {
  spec.validate();
  Mlp net{spec, Vec::Zero(spec.n_params())};
  Rng rng(spec.seed);
  int off = 0;
  for (int l = 0; l < spec.n_layers(); ++l) {
    const int in = spec.layer_sizes[l];
    const int out = spec.layer_sizes[l + 1];
    const double gain = l + 1 == spec.n_layers() ? spec.output_gain : spec.hidden_gain;
    Eigen::Map<Mat> w(net.params.data() + off, out, in);
    if (spec.init == Init::kOrthogonal) {
      w = orthogonal(rng, out, in, gain);
    } else {
      const double bound = 0.01 * gain;
      for (Eigen::Index i = 0; i < w.size(); ++i)
        w.data()[i] = uniform(rng, -bound, bound);
    }
    off += out * (in + 1);
  }
  return net;
}

Mat forward(const Mlp& net, const Mat& x, MlpCache* cache) {
  const MlpSpec& s = net.spec;
  if (x.rows() != s.in_dim())
    throw InvalidInput("mlp forward: input has " + std::to_string(x.rows()) +
                       " rows, expected " + std::to_string(s.in_dim()));
  if (net.params.size() != s.n_params())
    throw InvalidInput("mlp forward: parameter vector has the wrong size");
  if (cache != nullptr) {
    cache->inputs.resize(s.n_layers());
    cache->pre.resize(s.n_layers());
  }
  Mat h = x;
  int off = 0;
  for (int l = 0; l < s.n_layers(); ++l) {
    const int in = s.layer_sizes[l];
    const int out = s.layer_sizes[l + 1];
    const ConstMap w(net.params.data() + off, out, in);
    const Eigen::Map<const Vec> b(net.params.data() + off + out * in, out);
    Mat z = w * h;
    z.colwise() += b;
    off += out * (in + 1);
    if (cache != nullptr) cache->inputs[l] = std::move(h);
    if (l + 1 == s.n_layers()) {
      h = std::move(z);
    } else {
      h = activate(s.activation, z);
      if (cache != nullptr) cache->pre[l] = std::move(z);
    }
  }
  return h;
}

Vec forward_one(const Mlp& net, const Vec& x) {
  return forward(net, Mat(x), nullptr).col(0);
}

Mat backward(const Mlp& net, const MlpCache& cache, const Mat& out_grad,
             Vec& grad) {
  const MlpSpec& s = net.spec;
  if (grad.size() == 0) grad = Vec::Zero(s.n_params());
  if (grad.size() != s.n_params())
    throw InvalidInput("mlp backward: gradient vector has the wrong size");
  if (static_cast<int>(cache.inputs.size()) != s.n_layers())
    throw InvalidInput("mlp backward: cache does not match the network");
  std::vector<int> offsets(s.n_layers());
  int off = 0;
  for (int l = 0; l < s.n_layers(); ++l) {
    offsets[l] = off;
    off += s.layer_sizes[l + 1] * (s.layer_sizes[l] + 1);
  }
  Mat g = out_grad;
  for (int l = s.n_layers() - 1; l >= 0; --l) {
    const int in = s.layer_sizes[l];
    const int out = s.layer_sizes[l + 1];
    if (l + 1 < s.n_layers()) {
      // cache.inputs[l + 1] holds this layer's activation output.
      g.array() *= activation_grad(s.activation, cache.pre[l], cache.inputs[l + 1]).array();
    }
    Eigen::Map<Mat> gw(grad.data() + offsets[l], out, in);
    Eigen::Map<Vec> gb(grad.data() + offsets[l] + out * in, out);
    gw.noalias() += g * cache.inputs[l].transpose();
    gb += g.rowwise().sum();
    const ConstMap w(net.params.data() + offsets[l], out, in);
    g = w.transpose() * g;
  }
  return g;
}

}  // namespace wbt::nn
