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

#include "wbt/teacher/ppo.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace wbt::teacher {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

}  // namespace

int ActorCritic::n_params() const {
  return static_cast<int>(actor.params.size() + log_std.size() +
                          critic.params.size());
}

Vec ActorCritic::pack() const {
  Vec flat(n_params());
  flat << actor.params, log_std, critic.params;
  return flat;
}

void ActorCritic::unpack(const Vec& flat) {
  if (flat.size() != n_params())
    throw InvalidInput("ActorCritic::unpack: size mismatch");
  const auto na = actor.params.size();
  const auto nl = log_std.size();
  actor.params = flat.head(na);
  log_std = flat.segment(na, nl);
  critic.params = flat.tail(critic.params.size());
}

ActorCritic make_actor_critic(int obs_dim, int act_dim,
                              const std::vector<int>& hidden,
                              nn::Activation activation, double init_log_std,
                              std::uint64_t seed) {
  nn::MlpSpec a;
  a.layer_sizes.push_back(obs_dim);
  a.layer_sizes.insert(a.layer_sizes.end(), hidden.begin(), hidden.end());
  a.layer_sizes.push_back(act_dim);
  a.activation = activation;
  a.seed = seed;
  a.output_gain = 0.01;
  nn::MlpSpec c = a;
  c.layer_sizes.back() = 1;
  c.seed = seed + 1;
  c.output_gain = 1.0;
  ActorCritic ac;
  ac.actor = nn::make_mlp(a);
  ac.critic = nn::make_mlp(c);
  ac.log_std = Vec::Constant(act_dim, init_log_std);
  ac.obs_norm = nn::RunningNormalizer::make(obs_dim);
  return ac;
}

void RolloutBatch::resize(int envs, int steps, int obs_dim, int act_dim) {
  n_envs = envs;
  horizon = steps;
  const int n = envs * steps;
  obs.resize(obs_dim, n);
  actions.resize(act_dim, n);
  log_probs.resize(n);
  rewards.resize(n);
  values.resize(n);
  bootstrap = Vec::Zero(n);
  dones.assign(n, 0);
  truncated.assign(n, 0);
  reasons.assign(n, "");
}

void RolloutBatch::validate() const {
  const int n = size();
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidInput("rollout batch: " + what);
  };
  require(obs.cols() == n && actions.cols() == n && log_probs.size() == n &&
              rewards.size() == n && values.size() == n &&
              bootstrap.size() == n && static_cast<int>(dones.size()) == n &&
              static_cast<int>(truncated.size()) == n &&
              static_cast<int>(reasons.size()) == n,
          "field sizes disagree with n_envs * horizon");
  require(rewards.allFinite(), "non-finite reward");
  for (int i = 0; i < n; ++i) {
    require(!truncated[i] || dones[i], "truncated step not marked done");
    require(!dones[i] || !reasons[i].empty(), "done step without a reason");
  }
}

Advantages gae(const RolloutBatch& batch, double gamma, double lambda) {
  const int n = batch.size();
  if (batch.rewards.size() != n || batch.values.size() != n ||
      batch.bootstrap.size() != n || static_cast<int>(batch.dones.size()) != n ||
      static_cast<int>(batch.truncated.size()) != n)
    throw InvalidInput("gae: values and rewards are not aligned");
  Advantages out;
  out.advantages.resize(n);
  for (int e = 0; e < batch.n_envs; ++e) {
    double next_adv = 0.0;
    for (int t = batch.horizon - 1; t >= 0; --t) {
      const int i = batch.index(t, e);
      const bool done = batch.dones[i] != 0;
      const bool terminal = done && batch.truncated[i] == 0;
      const bool last = t == batch.horizon - 1;
      double next_value = 0.0;
      if (!terminal)
        next_value = (done || last) ? batch.bootstrap(i)
                                    : batch.values(batch.index(t + 1, e));
      const double delta =
          batch.rewards(i) + gamma * next_value - batch.values(i);
      const double carry = (done || last) ? 0.0 : next_adv;
      out.advantages(i) = delta + gamma * lambda * carry;
      next_adv = out.advantages(i);
    }
  }
  out.returns = out.advantages + batch.values;
  return out;
}

void PpoHyper::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("ppo: ") + what);
  };
  require(gamma >= 0 && gamma <= 1, "gamma must lie in [0, 1]");
  require(lambda >= 0 && lambda <= 1, "lambda must lie in [0, 1]");
  require(clip_eps > 0, "clip_eps must be > 0");
  require(epochs >= 1 && minibatches >= 1, "epochs and minibatches >= 1");
  require(value_coef >= 0 && entropy_coef >= 0, "coefficients must be >= 0");
  require(lr > 0, "lr must be > 0");
  require(max_grad_norm > 0, "max_grad_norm must be > 0");
  require(reward_scale > 0, "reward_scale must be > 0");
}

double gaussian_log_prob(const Vec& mean, const Vec& log_std, const Vec& x) {
  const Vec z = (x - mean).cwiseQuotient(log_std.array().exp().matrix());
  return -0.5 * z.squaredNorm() - log_std.sum() -
         kHalfLog2Pi * static_cast<double>(mean.size());
}

PpoLossTerms ppo_loss(const ActorCritic& ac, const Mat& obs,
                      const Mat& actions, const Vec& old_log_probs,
                      const Vec& advantages, const Vec& returns,
                      const PpoHyper& hyper, Vec* grad) {
  const auto b = obs.cols();
  if (b == 0 || actions.cols() != b || old_log_probs.size() != b ||
      advantages.size() != b || returns.size() != b)
    throw InvalidInput("ppo_loss: batch fields disagree");
  nn::MlpCache actor_cache, critic_cache;
  const Mat mean = nn::forward(ac.actor, obs, grad ? &actor_cache : nullptr);
  const Mat value = nn::forward(ac.critic, obs, grad ? &critic_cache : nullptr);
  const Vec inv_var = (-2.0 * ac.log_std).array().exp().matrix();
  const Mat diff = actions - mean;
  const double inv_b = 1.0 / static_cast<double>(b);

  PpoLossTerms t;
  Mat d_mean(mean.rows(), b);
  Vec d_log_std = Vec::Zero(ac.log_std.size());
  Mat d_value(1, b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const double logp =
        -0.5 * diff.col(i).cwiseAbs2().dot(inv_var) - ac.log_std.sum() -
        kHalfLog2Pi * static_cast<double>(mean.rows());
    const double ratio = std::exp(logp - old_log_probs(i));
    const double a = advantages(i);
    const double clipped =
        std::clamp(ratio, 1.0 - hyper.clip_eps, 1.0 + hyper.clip_eps);
    const bool unclipped_active = ratio * a <= clipped * a;
    t.policy_loss -= std::min(ratio * a, clipped * a) * inv_b;
    t.kl_approx += ((ratio - 1.0) - (logp - old_log_probs(i))) * inv_b;
    if (std::abs(ratio - 1.0) > hyper.clip_eps) t.clip_frac += inv_b;
    t.max_ratio_dev = std::max(t.max_ratio_dev, std::abs(ratio - 1.0));
    const double g_logp = unclipped_active ? -ratio * a * inv_b : 0.0;
    d_mean.col(i) = g_logp * diff.col(i).cwiseProduct(inv_var);
    d_log_std.array() +=
        g_logp * (diff.col(i).cwiseAbs2().cwiseProduct(inv_var).array() - 1.0);
    const double verr = value(0, i) - returns(i);
    t.value_loss += verr * verr * inv_b;
    d_value(0, i) = hyper.value_coef * 2.0 * verr * inv_b;
  }
  t.entropy = ac.log_std.sum() +
              (0.5 + kHalfLog2Pi) * static_cast<double>(ac.log_std.size());
  t.total = t.policy_loss + hyper.value_coef * t.value_loss -
            hyper.entropy_coef * t.entropy;
  if (grad) {
    if (grad->size() == 0) *grad = Vec::Zero(ac.n_params());
    if (grad->size() != ac.n_params())
      throw InvalidInput("ppo_loss: gradient size mismatch");
    const auto na = ac.actor.params.size();
    const auto nl = ac.log_std.size();
    Vec g_actor = grad->head(na);
    nn::backward(ac.actor, actor_cache, d_mean, g_actor);
    grad->head(na) = g_actor;
    grad->segment(na, nl) +=
        d_log_std - hyper.entropy_coef * Vec::Ones(nl);
    Vec g_critic = grad->tail(ac.critic.params.size());
    nn::backward(ac.critic, critic_cache, d_value, g_critic);
    grad->tail(ac.critic.params.size()) = g_critic;
  }
  return t;
}

PpoStats ppo_update(ActorCritic& ac, nn::AdamState& adam,
                    const RolloutBatch& batch, const Advantages& adv,
                    const PpoHyper& hyper, Rng& rng) {
  hyper.validate();
  const int n = batch.size();
  if (adv.advantages.size() != n || adv.returns.size() != n)
    throw InvalidInput("ppo_update: advantages do not match the batch");
  Vec a = adv.advantages;
  if (hyper.normalize_advantages && n > 1) {
    const double mean = a.mean();
    const double sd =
        std::sqrt((a.array() - mean).square().sum() / static_cast<double>(n));
    a = ((a.array() - mean) / (sd + 1e-8)).matrix();
  }

  ActorCritic work = ac;
  nn::AdamState state = adam;
  if (state.m.size() == 0) state = nn::make_adam_state(work.n_params());
  nn::AdamHyper ah;
  ah.lr = hyper.lr;
  Vec flat = work.pack();

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  const int mb = std::max(1, n / hyper.minibatches);
  PpoStats stats;
  int count = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int k = 0; k < hyper.minibatches; ++k) {
      const int lo = k * mb;
      const int hi = k + 1 == hyper.minibatches ? n : lo + mb;
      if (lo >= hi) continue;
      const int m = hi - lo;
      Mat obs(batch.obs.rows(), m), act(batch.actions.rows(), m);
      Vec old_lp(m), av(m), ret(m);
      for (int j = 0; j < m; ++j) {
        const int i = perm[lo + j];
        obs.col(j) = batch.obs.col(i);
        act.col(j) = batch.actions.col(i);
        old_lp(j) = batch.log_probs(i);
        av(j) = a(i);
        ret(j) = adv.returns(i);
      }
      Vec grad;
      const auto terms =
          ppo_loss(work, obs, act, old_lp, av, ret, hyper, &grad);
      if (!std::isfinite(terms.total) || !grad.allFinite()) {
        std::ostringstream msg;
        msg << "ppo_update: non-finite loss at epoch " << epoch
            << ", minibatch " << k << " (policy_loss " << terms.policy_loss
            << ", value_loss " << terms.value_loss << ", kl "
            << terms.kl_approx << ")";
        throw NumericalDivergence(msg.str());
      }
      if (epoch == 0 && k == 0) stats.first_ratio_dev = terms.max_ratio_dev;
      stats.grad_norm += nn::clip_grad_norm(grad, hyper.max_grad_norm);
      nn::adam_step(flat, grad, state, ah);
      work.unpack(flat);
      stats.policy_loss += terms.policy_loss;
      stats.value_loss += terms.value_loss;
      stats.entropy += terms.entropy;
      stats.kl_approx += terms.kl_approx;
      stats.clip_frac += terms.clip_frac;
      ++count;
    }
  }
  const double inv = 1.0 / std::max(count, 1);
  stats.policy_loss *= inv;
  stats.value_loss *= inv;
  stats.entropy *= inv;
  stats.kl_approx *= inv;
  stats.clip_frac *= inv;
  stats.grad_norm *= inv;
  if (!flat.allFinite())
    throw NumericalDivergence("ppo_update: parameters became non-finite");
  ac = std::move(work);
  adam = std::move(state);
  return stats;
}

}  // namespace wbt::teacher
