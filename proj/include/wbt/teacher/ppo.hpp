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

#ifndef WBT_TEACHER_PPO_HPP_
#define WBT_TEACHER_PPO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "wbt/common.hpp"
#include "wbt/nn/mlp.hpp"
#include "wbt/nn/optim.hpp"

namespace wbt::teacher {

// Gaussian actor with a state-independent log std and a separate critic,
// both fed the normalized observation.
struct ActorCritic {
  nn::Mlp actor;
  Vec log_std;
  nn::Mlp critic;
  nn::RunningNormalizer obs_norm;

  int obs_dim() const { return actor.spec.in_dim(); }
  int act_dim() const { return actor.spec.out_dim(); }
  int n_params() const;
  // [actor params, log_std, critic params]
  Vec pack() const;
  void unpack(const Vec& flat);
};

ActorCritic make_actor_critic(int obs_dim, int act_dim,
                              const std::vector<int>& hidden,
                              nn::Activation activation, double init_log_std,
                              std::uint64_t seed);

// Flattened rollout, index t * n_envs + env.
struct RolloutBatch {
  int n_envs = 0;
  int horizon = 0;
  Mat obs;  // normalized, one column per step
  Mat actions;
  Vec log_probs;
  Vec rewards;
  Vec values;
  // Value of the state reached after the step. Read only where the episode
  // was truncated or the horizon ends.
  Vec bootstrap;
  std::vector<std::uint8_t> dones;
  std::vector<std::uint8_t> truncated;
  std::vector<std::string> reasons;

  int size() const { return n_envs * horizon; }
  int index(int t, int env) const { return t * n_envs + env; }
  void resize(int n_envs, int horizon, int obs_dim, int act_dim);
  // Throws InvalidInput on ragged fields, non-finite rewards or a done flag
  // without a reason.
  void validate() const;
};

struct Advantages {
  Vec advantages;
  Vec returns;
};

// delta_t = r_t + gamma * V_next (1 - terminal) - V_t and
// A_t = delta_t + gamma * lambda * (1 - done) * A_{t+1}, per environment.
// V_next is the next step's value, or the bootstrap value at a truncation
// and at the end of the horizon. returns = A + V.
Advantages gae(const RolloutBatch& batch, double gamma, double lambda);

struct PpoHyper {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip_eps = 0.2;
  int epochs = 5;
  int minibatches = 4;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double lr = 3e-4;
  double max_grad_norm = 1.0;
  bool normalize_advantages = true;
  // Rewards are multiplied by this before GAE, keeping value targets near
  // unit scale. The logged rewards stay unscaled.
  double reward_scale = 0.02;

  void validate() const;  // throws ConfigError
};

struct PpoLossTerms {
  double total = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double kl_approx = 0.0;
  double clip_frac = 0.0;
  double max_ratio_dev = 0.0;  // max |ratio - 1|
};

double gaussian_log_prob(const Vec& mean, const Vec& log_std, const Vec& x);

// Clipped surrogate + value_coef * MSE - entropy_coef * entropy on one
// minibatch. Adds d(total)/d(packed params) to `grad` when given (resized
// and zeroed if empty).
PpoLossTerms ppo_loss(const ActorCritic& ac, const Mat& obs,
                      const Mat& actions, const Vec& old_log_probs,
                      const Vec& advantages, const Vec& returns,
                      const PpoHyper& hyper, Vec* grad = nullptr);

struct PpoStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double kl_approx = 0.0;
  double clip_frac = 0.0;
  double grad_norm = 0.0;
  // max |ratio - 1| on epoch 0, minibatch 0; 0 when nothing has moved yet.
  double first_ratio_dev = 0.0;
};

// Runs `epochs` passes of shuffled minibatch Adam steps. On a non-finite
// loss or gradient, throws NumericalDivergence and leaves `ac` and `adam`
// untouched.
PpoStats ppo_update(ActorCritic& ac, nn::AdamState& adam,
                    const RolloutBatch& batch, const Advantages& adv,
                    const PpoHyper& hyper, Rng& rng);

}  // namespace wbt::teacher

#endif  // WBT_TEACHER_PPO_HPP_
