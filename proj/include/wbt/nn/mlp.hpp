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
#ifndef WBT_NN_MLP_HPP_
#define WBT_NN_MLP_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "wbt/common.hpp"

namespace wbt::nn {

enum class Activation { kTanh, kElu };
enum class Init { kOrthogonal, kSmallUniform };

const char* to_string(Activation a);
const char* to_string(Init i);
Activation activation_from_string(const std::string& s);
Init init_from_string(const std::string& s);

// Fully connected network; hidden layers use `activation`, the output layer
// is linear.
struct MlpSpec {
  std::vector<int> layer_sizes;  // input, hidden..., output
  Activation activation = Activation::kElu;
  Init init = Init::kOrthogonal;
  std::uint64_t seed = 0;
  double hidden_gain = 1.4142135623730951;
  double output_gain = 1.0;  // 0 gives a zero output layer

  int in_dim() const { return layer_sizes.front(); }
  int out_dim() const { return layer_sizes.back(); }
  int n_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }
  int n_params() const;
  void validate() const;  // throws InvalidInput
};

// Parameters are one flat vector: for each layer, the weight matrix
// (out x in, column-major) followed by the bias.
struct Mlp {
  MlpSpec spec;
  Vec params;
};

// Initializes parameters from spec.seed. Biases start at zero.
Mlp make_mlp(const MlpSpec& spec);

// Layer inputs and pre-activations of a batched forward pass.
struct MlpCache {
  std::vector<Mat> inputs;
  std::vector<Mat> pre;
};

// Batched forward pass, one sample per column. Throws InvalidInput on a
// dimension mismatch.
Mat forward(const Mlp& net, const Mat& x, MlpCache* cache = nullptr);
// Single-sample convenience wrapper.
Vec forward_one(const Mlp& net, const Vec& x);

// Accumulates dL/dparams into `grad` (resized and zeroed when empty) given
// dL/doutput for the cached batch, and returns dL/dinput.
Mat backward(const Mlp& net, const MlpCache& cache, const Mat& out_grad,
             Vec& grad);

}  // namespace wbt::nn

#endif  // WBT_NN_MLP_HPP_
