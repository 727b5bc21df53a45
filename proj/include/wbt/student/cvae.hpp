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

#ifndef WBT_STUDENT_CVAE_HPP_
#define WBT_STUDENT_CVAE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wbt/common.hpp"
#include "wbt/json_util.hpp"
#include "wbt/nn/gaussian.hpp"
#include "wbt/nn/mlp.hpp"
#include "wbt/nn/optim.hpp"

namespace wbt::student {

// kMlp is the plain DAgger baseline: one network from [history, goal] to
// the action.
enum class StudentArch { kCvae, kMlp };
// Latent used when acting: the prior mean or a prior sample.
enum class LatentMode { kDeterministic, kStochastic };

const char* to_string(StudentArch a);
const char* to_string(LatentMode m);
StudentArch student_arch_from_string(const std::string& s);
LatentMode latent_mode_from_string(const std::string& s);

struct StudentSpec {
  StudentArch arch = StudentArch::kCvae;
  int history = 25;
  int window = 5;
  int latent_dim = 64;
  std::vector<int> hidden = {256, 128};
  nn::Activation activation = nn::Activation::kElu;
  // Decoder also receives the goal (ablation variant).
  bool explicit_ref = false;
  // Encoder mean = prior mean + residual; off makes the encoder mean free.
  bool kl_residual = true;
  LatentMode latent_mode = LatentMode::kDeterministic;
  std::uint64_t seed = 0;

  // Wiring, filled from the robot.
  int n_joints = 0;
  int n_keypoints = 0;
  int oracle_dim = 0;

  int history_dim() const;
  int goal_dim() const;
  int deploy_dim() const { return history_dim() + goal_dim(); }
  int prior_in_dim() const { return deploy_dim(); }
  int encoder_in_dim() const { return oracle_dim; }
  // [history, z], plus the goal for explicit_ref; [history, goal] for kMlp.
  int decoder_in_dim() const;
  void validate() const;  // throws ConfigError
};

nlohmann::json to_json(const StudentSpec& s);
// Reads the architecture fields; wiring dimensions are read when present.
StudentSpec student_spec_from_json(JsonReader r, StudentSpec base = {});

// Flat parameter order: prior, encoder, decoder (kMlp: decoder only).
struct StudentParams {
  StudentSpec spec;
  nn::Mlp prior;    // deploy obs -> [mu, raw log_std]
  nn::Mlp encoder;  // oracle obs -> [mu or residual, raw log_std]
  nn::Mlp decoder;  // -> [action mean, raw log_std] (kMlp: action mean)
  nn::RunningNormalizer deploy_norm;
  nn::RunningNormalizer oracle_norm;

  int n_params() const;
  Vec pack() const;
  void unpack(const Vec& flat);
};

StudentParams make_student(const StudentSpec& spec);

enum class ForwardMode { kTrain, kDeployPriorMean, kDeployPriorSample };

struct StudentOutput {
  Vec action;
  Vec z;  // empty for kMlp
  nn::GaussianHead prior;
  nn::GaussianHead encoder;  // set in train mode
  nn::GaussianHead decoder;
};

// Raw (unnormalized) observations. Train mode samples z from the encoder
// and requires oracle_obs; deploy modes use the prior. kMlp ignores the
// mode.
StudentOutput student_forward(const StudentParams& params,
                              const Vec& deploy_obs, const Vec* oracle_obs,
                              ForwardMode mode, Rng* rng);

// Deploy-mode actions for a batch of raw observations (columns).
Mat student_act(const StudentParams& params, const Mat& deploy_obs,
                LatentMode mode, Rng* rng);

struct DistillLoss {
  double l_action = 0.0;
  double l_kl = 0.0;
  double beta = 0.0;
  double total = 0.0;
  int samples = 0;
  int skipped = 0;  // non-finite teacher labels
};

// Loss on normalized observations with explicit latent noise (latent_dim x
// B standard normals) so that it is a deterministic function of the
// parameters. Per sample: ||mu_D - a*||^2 + beta * KL(encoder || prior);
// averaged over samples. The decoder log std receives no gradient. Columns
// with non-finite labels are skipped and counted.
DistillLoss distill_loss(const StudentParams& params, const Mat& deploy_norm,
                         const Mat& oracle_norm, const Mat& labels,
                         const Mat& noise, double beta, Vec* grad = nullptr);

}  // namespace wbt::student

#endif  // WBT_STUDENT_CVAE_HPP_
