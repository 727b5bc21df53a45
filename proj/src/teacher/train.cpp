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

#include "wbt/teacher/train.hpp"

#include <limits>

#include "wbt/eval/metrics.hpp"

namespace wbt::teacher {

using nlohmann::json;

namespace {

json interval_json(const sim::Interval& i) { return json::array({i.lo, i.hi}); }

void read_interval(JsonReader& r, const char* key, sim::Interval& out) {
  std::vector<double> v{out.lo, out.hi};
  r.get(key, v);
  if (v.size() != 2) throw ConfigError(r.where(key) + ": expected [lo, hi]");
  out = {v[0], v[1]};
}

json randomization_json(const sim::RandomizationSpec& s) {
  return {{"mode", sim::to_string(s.mode)},
          {"friction_range", interval_json(s.friction_range)},
          {"mass_scale_range", interval_json(s.mass_scale_range)},
          {"com_offset_range", interval_json(s.com_offset_range)},
          {"pd_scale_range", interval_json(s.pd_scale_range)},
          {"torque_noise_std", s.torque_noise_std},
          {"push_interval_s", s.push_interval_s},
          {"push_magnitude_range", interval_json(s.push_magnitude_range)}};
}

sim::RandomizationSpec randomization_from(JsonReader r,
                                          sim::RandomizationSpec s) {
  std::string mode = sim::to_string(s.mode);
  r.get("mode", mode);
  s.mode = sim::randomization_mode_from_string(mode);
  read_interval(r, "friction_range", s.friction_range);
  read_interval(r, "mass_scale_range", s.mass_scale_range);
  read_interval(r, "com_offset_range", s.com_offset_range);
  read_interval(r, "pd_scale_range", s.pd_scale_range);
  r.get("torque_noise_std", s.torque_noise_std);
  r.get("push_interval_s", s.push_interval_s);
  read_interval(r, "push_magnitude_range", s.push_magnitude_range);
  r.finish();
  return s;
}

json reward_json(const RewardWeights& w) {
  return {{"w_kp", w.w_kp},
          {"w_jpos", w.w_jpos},
          {"w_jvel", w.w_jvel},
          {"w_linvel", w.w_linvel},
          {"sigma_kp", w.sigma_kp},
          {"sigma_jpos", w.sigma_jpos},
          {"sigma_jvel", w.sigma_jvel},
          {"sigma_linvel", w.sigma_linvel},
          {"w_action_rate", w.w_action_rate},
          {"w_torque", w.w_torque},
          {"w_slip", w.w_slip},
          {"curriculum_ramp_end", w.curriculum.ramp_end}};
}

RewardWeights reward_from(JsonReader r) {
  RewardWeights w;
  r.get("w_kp", w.w_kp);
  r.get("w_jpos", w.w_jpos);
  r.get("w_jvel", w.w_jvel);
  r.get("w_linvel", w.w_linvel);
  r.get("sigma_kp", w.sigma_kp);
  r.get("sigma_jpos", w.sigma_jpos);
  r.get("sigma_jvel", w.sigma_jvel);
  r.get("sigma_linvel", w.sigma_linvel);
  r.get("w_action_rate", w.w_action_rate);
  r.get("w_torque", w.w_torque);
  r.get("w_slip", w.w_slip);
  r.get("curriculum_ramp_end", w.curriculum.ramp_end);
  r.finish();
  return w;
}

json ppo_json(const PpoHyper& h) {
  return {{"gamma", h.gamma},
          {"lambda", h.lambda},
          {"clip_eps", h.clip_eps},
          {"epochs", h.epochs},
          {"minibatches", h.minibatches},
          {"value_coef", h.value_coef},
          {"entropy_coef", h.entropy_coef},
          {"lr", h.lr},
          {"max_grad_norm", h.max_grad_norm},
          {"normalize_advantages", h.normalize_advantages},
          {"reward_scale", h.reward_scale}};
}

PpoHyper ppo_from(JsonReader r) {
  PpoHyper h;
  r.get("gamma", h.gamma);
  r.get("lambda", h.lambda);
  r.get("clip_eps", h.clip_eps);
  r.get("epochs", h.epochs);
  r.get("minibatches", h.minibatches);
  r.get("value_coef", h.value_coef);
  r.get("entropy_coef", h.entropy_coef);
  r.get("lr", h.lr);
  r.get("max_grad_norm", h.max_grad_norm);
  r.get("normalize_advantages", h.normalize_advantages);
  r.get("reward_scale", h.reward_scale);
  r.finish();
  return h;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

EnvConfig TeacherConfig::default_env() {
  EnvConfig e;
  e.randomization.mode = sim::RandomizationMode::kAssetOnly;
  return e;
}

void TeacherConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("teacher config: ") + what);
  };
  require(iterations >= 0, "iterations must be >= 0");
  require(n_envs >= 1 && horizon >= 1, "n_envs and horizon must be >= 1");
  require(!hidden.empty(), "hidden must list at least one layer");
  for (int h : hidden) require(h >= 1, "hidden sizes must be >= 1");
  require(init_log_std >= nn::kLogStdMin && init_log_std <= nn::kLogStdMax,
          "init_log_std outside the clamp range");
  require(eval_every >= 0 && checkpoint_every >= 0,
          "eval_every and checkpoint_every must be >= 0");
  require(jobs >= 1, "jobs must be >= 1");
  ppo.validate();
  env.validate();
}

json to_json(const EnvConfig& c) {
  return {{"randomization", randomization_json(c.randomization)},
          {"pushes", c.pushes},
          {"reference_state_init", c.reference_state_init},
          {"early_termination", c.early_termination},
          {"action_scale", c.action_scale},
          {"reward", reward_json(c.reward)}};
}

EnvConfig env_config_from_json(JsonReader r) {
  EnvConfig c;
  c.randomization = randomization_from(r.child("randomization"), {});
  r.get("pushes", c.pushes);
  r.get("reference_state_init", c.reference_state_init);
  r.get("early_termination", c.early_termination);
  r.get("action_scale", c.action_scale);
  c.reward = reward_from(r.child("reward"));
  r.finish();
  return c;
}

json to_json(const TeacherConfig& c) {
  return {{"seed", c.seed},
          {"iterations", c.iterations},
          {"n_envs", c.n_envs},
          {"horizon", c.horizon},
          {"hidden", c.hidden},
          {"activation", nn::to_string(c.activation)},
          {"init_log_std", c.init_log_std},
          {"ppo", ppo_json(c.ppo)},
          {"env", to_json(c.env)},
          {"eval_every", c.eval_every},
          {"checkpoint_every", c.checkpoint_every},
          {"jobs", c.jobs},
          {"fault_iteration", c.fault_iteration}};
}

TeacherConfig teacher_config_from_json(const json& j) {
  JsonReader r(j, "teacher");
  TeacherConfig c;
  r.require("seed", c.seed);
  r.get("iterations", c.iterations);
  r.get("n_envs", c.n_envs);
  r.get("horizon", c.horizon);
  r.get("hidden", c.hidden);
  std::string act = nn::to_string(c.activation);
  r.get("activation", act);
  try {
    c.activation = nn::activation_from_string(act);
  } catch (const Error& e) {
    throw ConfigError(r.where("activation") + ": " + e.what());
  }
  r.get("init_log_std", c.init_log_std);
  c.ppo = ppo_from(r.child("ppo"));
  if (r.has("env")) {
    JsonReader er = r.child("env");
    const bool has_rand = er.has("randomization");
    c.env = env_config_from_json(er);
    if (!has_rand) c.env.randomization = TeacherConfig::default_env().randomization;
  } else {
    r.child("env");
  }
  r.get("eval_every", c.eval_every);
  r.get("checkpoint_every", c.checkpoint_every);
  r.get("jobs", c.jobs);
  r.get("fault_iteration", c.fault_iteration);
  r.finish();
  c.validate();
  return c;
}

Mat policy_mean(const ActorCritic& ac, const Mat& raw_obs) {
  return nn::forward(ac.actor, ac.obs_norm.normalize(raw_obs));
}

PpoPolicy::PpoPolicy(ActorCritic ac, double action_scale,
                     std::unique_ptr<ObsBuilder> builder, std::string id)
    : ac_(std::move(ac)),
      action_scale_(action_scale),
      builder_(std::move(builder)),
      id_(std::move(id)) {
  if (builder_->dim() != ac_.obs_dim())
    throw InvalidInput("PpoPolicy: observation builder has dimension " +
                       std::to_string(builder_->dim()) + ", network expects " +
                       std::to_string(ac_.obs_dim()));
  reset();
}

void PpoPolicy::reset() {
  builder_->reset();
  prev_action_ = Vec::Zero(ac_.act_dim());
}

Vec PpoPolicy::act(const sim::SimState& state, const motion::MotionClip& clip,
                   int frame, const eval::NoiseSpec& noise, Rng& rng) {
  const auto obs = eval::observe(state, noise, rng);
  const Vec raw = builder_->build(obs, prev_action_, clip, frame);
  const Vec a = policy_mean(ac_, raw).col(0);
  prev_action_ = a;
  return clip.clamped(frame + 1).q + action_scale_ * a;
}

nn::Checkpoint to_checkpoint(const ActorCritic& ac, json meta) {
  nn::Checkpoint ck;
  ck.kind = "ppo_policy";
  ck.networks["actor"] = ac.actor;
  ck.networks["critic"] = ac.critic;
  ck.vectors["log_std"] = ac.log_std;
  ck.vectors["obs_mean"] = ac.obs_norm.mean;
  ck.vectors["obs_var"] = ac.obs_norm.var;
  meta["obs_count"] = ac.obs_norm.count;
  meta["obs_clip"] = ac.obs_norm.clip;
  ck.meta = std::move(meta);
  return ck;
}

ActorCritic actor_critic_from_checkpoint(const nn::Checkpoint& ck) {
  if (ck.kind != "ppo_policy")
    throw InvalidInput("checkpoint kind '" + ck.kind + "' is not ppo_policy");
  ActorCritic ac;
  ac.actor = ck.network("actor");
  ac.critic = ck.network("critic");
  ac.log_std = ck.vector("log_std");
  ac.obs_norm.mean = ck.vector("obs_mean");
  ac.obs_norm.var = ck.vector("obs_var");
  ac.obs_norm.count = ck.meta.value("obs_count", 0.0);
  ac.obs_norm.clip = ck.meta.value("obs_clip", 10.0);
  if (ac.log_std.size() != ac.act_dim() ||
      ac.obs_norm.mean.size() != ac.obs_dim() ||
      ac.critic.spec.in_dim() != ac.obs_dim())
    throw InvalidInput("ppo_policy checkpoint: inconsistent dimensions");
  return ac;
}

TrainOutput train_teacher(const sim::RobotModel& model,
                          const std::vector<motion::MotionClip>& clips,
                          const TeacherConfig& config,
                          const ObsBuilder& obs_proto, const TrainIo& io) {
  config.validate();
  check_clips(model, clips);
  const int n_envs = config.n_envs;
  const int horizon = config.horizon;
  const int obs_dim = obs_proto.dim();
  const int act_dim = model.n_joints();

  TrainOutput out;
  out.ac = make_actor_critic(obs_dim, act_dim, config.hidden, config.activation,
                             config.init_log_std, derive_seed(config.seed, 0));
  nn::AdamState adam = nn::make_adam_state(out.ac.n_params());
  Rng update_rng(derive_seed(config.seed, 1));

  json meta = io.extra_meta;
  meta["type"] = "teacher";
  meta["action_scale"] = config.env.action_scale;
  meta["obs"] = obs_proto.describe();
  meta["seed"] = config.seed;
  meta["config"] = to_json(config);
  // Results do not depend on the worker count.
  meta["config"].erase("jobs");
  auto make_checkpoint = [&](const ActorCritic& ac, int done) {
    json m = meta;
    m["iterations_done"] = done;
    return to_checkpoint(ac, m);
  };
  const bool persist = !io.out_dir.empty();
  const auto ckpt_path = io.out_dir / (io.name + ".json");
  const auto log_path = io.out_dir / (io.name + "_log.jsonl");
  std::string log_text;
  if (persist) write_text_file(log_path, "");

  std::vector<TrackingEnv> envs;
  std::vector<std::unique_ptr<ObsBuilder>> builders;
  std::vector<Vec> cur_obs(n_envs);
  envs.reserve(n_envs);
  for (int e = 0; e < n_envs; ++e) {
    envs.emplace_back(model, clips, config.env, derive_seed(config.seed, 2 + e));
    builders.push_back(obs_proto.clone());
  }
  auto observe_env = [&](int e) {
    auto& env = envs[e];
    return builders[e]->build(exact_observation(env.state()),
                              env.prev_action(), env.clip(), env.frame());
  };
  for (int e = 0; e < n_envs; ++e) {
    envs[e].reset();
    builders[e]->reset();
    cur_obs[e] = observe_env(e);
  }

  RolloutBatch batch;
  Mat raw_all(obs_dim, n_envs * horizon);
  std::vector<StepResult> results(n_envs);
  std::vector<Vec> boot_obs(n_envs);
  std::vector<double> ended_returns(n_envs);
  for (int it = 0; it < config.iterations; ++it) {
    const double progress =
        static_cast<double>(it) / static_cast<double>(config.iterations);
    batch.resize(n_envs, horizon, obs_dim, act_dim);
    const Vec std_dev = nn::clamp_log_std(out.ac.log_std).array().exp();
    double return_sum = 0.0;
    int episodes = 0;
    int terminations = 0;
    for (int t = 0; t < horizon; ++t) {
      Mat raw(obs_dim, n_envs);
      for (int e = 0; e < n_envs; ++e) raw.col(e) = cur_obs[e];
      const Mat x = out.ac.obs_norm.normalize(raw);
      const Mat mean = nn::forward(out.ac.actor, x);
      const Mat value = nn::forward(out.ac.critic, x);
      Mat actions(act_dim, n_envs);
      for (int e = 0; e < n_envs; ++e) {
        const Vec eps = normal_vec(envs[e].rng(), act_dim);
        actions.col(e) = mean.col(e) + std_dev.cwiseProduct(eps);
        const int i = batch.index(t, e);
        batch.obs.col(i) = x.col(e);
        raw_all.col(i) = raw.col(e);
        batch.actions.col(i) = actions.col(e);
        batch.log_probs(i) =
            gaussian_log_prob(mean.col(e), out.ac.log_std, actions.col(e));
        batch.values(i) = value(0, e);
      }
      parallel_for(n_envs, config.jobs, [&](int e) {
        auto& env = envs[e];
        results[e] = env.step(actions.col(e), progress);
        if (results[e].done) {
          if (results[e].truncated) boot_obs[e] = observe_env(e);
          ended_returns[e] = env.episode_return();
          env.reset();
          builders[e]->reset();
        }
        cur_obs[e] = observe_env(e);
      });
      std::vector<int> boot_envs;
      for (int e = 0; e < n_envs; ++e) {
        const auto& r = results[e];
        const int i = batch.index(t, e);
        batch.rewards(i) = r.reward;
        batch.dones[i] = r.done;
        batch.truncated[i] = r.truncated;
        batch.reasons[i] = r.reason;
        if (r.done) {
          return_sum += ended_returns[e];
          ++episodes;
          if (!r.truncated) ++terminations;
        }
        if (r.truncated || (t == horizon - 1 && !r.done)) boot_envs.push_back(e);
      }
      if (!boot_envs.empty()) {
        Mat braw(obs_dim, static_cast<Eigen::Index>(boot_envs.size()));
        for (std::size_t k = 0; k < boot_envs.size(); ++k) {
          const int e = boot_envs[k];
          braw.col(k) = results[e].truncated ? boot_obs[e] : cur_obs[e];
        }
        const Mat bv =
            nn::forward(out.ac.critic, out.ac.obs_norm.normalize(braw));
        for (std::size_t k = 0; k < boot_envs.size(); ++k)
          batch.bootstrap(batch.index(t, boot_envs[k])) = bv(0, k);
      }
    }
    out.env_steps += static_cast<long>(n_envs) * horizon;
    if (it == config.fault_iteration)
      batch.rewards.setConstant(std::numeric_limits<double>::quiet_NaN());

    const double mean_reward = batch.rewards.mean();
    json rec = {{"iteration", it},
                {"progress", progress},
                {"mean_reward", nullable(mean_reward)},
                {"mean_return",
                 episodes > 0 ? json(return_sum / episodes) : json(nullptr)},
                {"episodes", episodes},
                {"terminations", terminations},
                {"env_steps", out.env_steps}};
    auto halt = [&](const std::string& why) {
      out.checkpoint = make_checkpoint(out.ac, it);
      if (persist) nn::save_checkpoint(out.checkpoint, ckpt_path);
      throw TrainingDiverged("teacher training diverged at iteration " +
                                 std::to_string(it) + ": " + why +
                                 "; kept parameters after iteration " +
                                 std::to_string(it - 1),
                             it - 1);
    };
    if (!std::isfinite(mean_reward)) halt("mean reward is not finite");
    batch.rewards *= config.ppo.reward_scale;
    const Advantages adv = gae(batch, config.ppo.gamma, config.ppo.lambda);
    PpoStats stats;
    try {
      stats = ppo_update(out.ac, adam, batch, adv, config.ppo, update_rng);
    } catch (const NumericalDivergence& e) {
      halt(e.what());
    }
    out.ac.obs_norm.update(raw_all);
    rec["policy_loss"] = stats.policy_loss;
    rec["value_loss"] = stats.value_loss;
    rec["entropy"] = stats.entropy;
    rec["kl_approx"] = stats.kl_approx;
    rec["clip_frac"] = stats.clip_frac;
    rec["grad_norm"] = stats.grad_norm;
    rec["first_ratio_dev"] = stats.first_ratio_dev;

    const bool last = it + 1 == config.iterations;
    if (config.eval_every > 0 && ((it + 1) % config.eval_every == 0 || last)) {
      PpoPolicy policy(out.ac, config.env.action_scale, obs_proto.clone());
      const auto report =
          eval::evaluate_suite(model, policy, clips, {}, {config.seed});
      const auto agg = report.summary();
      rec["sr"] = agg.sr;
      rec["mpkpe"] = agg.mpkpe_all;
    }
    if (persist) {
      const std::string line = rec.dump() + "\n";
      log_text += line;
      write_text_file(log_path, log_text);
      if (config.checkpoint_every > 0 && (it + 1) % config.checkpoint_every == 0)
        nn::save_checkpoint(make_checkpoint(out.ac, it + 1), ckpt_path);
    }
    out.log.push_back(std::move(rec));
  }
  out.checkpoint = make_checkpoint(out.ac, config.iterations);
  if (persist) nn::save_checkpoint(out.checkpoint, ckpt_path);
  return out;
}

TrainOutput train_teacher(const sim::RobotModel& model,
                          const std::vector<motion::MotionClip>& clips,
                          const TeacherConfig& config, const TrainIo& io) {
  OracleObsBuilder proto(model);
  return train_teacher(model, clips, config, proto, io);
}

std::unique_ptr<PpoPolicy> load_teacher_policy(const sim::RobotModel& model,
                                               const nn::Checkpoint& ckpt) {
  const auto obs = ckpt.meta.value("obs", json::object());
  if (obs.value("type", "") != "oracle")
    throw InvalidInput("checkpoint does not use oracle observations");
  return std::make_unique<PpoPolicy>(
      actor_critic_from_checkpoint(ckpt),
      ckpt.meta.at("action_scale").get<double>(),
      std::make_unique<OracleObsBuilder>(model), "teacher");
}

}  // namespace wbt::teacher
