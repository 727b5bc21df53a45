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

#include "wbt/student/distill.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

#include "wbt/eval/metrics.hpp"
#include "wbt/teacher/obs.hpp"

namespace wbt::student {

using nlohmann::json;

teacher::EnvConfig StudentConfig::default_env() {
  teacher::EnvConfig e;
  e.randomization.mode = sim::RandomizationMode::kAssetAndDynamics;
  return e;
}

void StudentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("student config: ") + what);
  };
  require(iterations >= 0, "iterations must be >= 0");
  require(n_envs >= 1 && horizon >= 1, "n_envs and horizon must be >= 1");
  require(beta >= 0.0, "beta must be >= 0");
  require(lr > 0.0, "lr must be > 0");
  require(epochs >= 1 && minibatches >= 1,
          "epochs and minibatches must be >= 1");
  require(max_grad_norm > 0.0, "max_grad_norm must be > 0");
  require(buffer_iterations >= 1, "buffer_iterations must be >= 1");
  require(eval_every >= 0 && checkpoint_every >= 0,
          "eval_every and checkpoint_every must be >= 0");
  require(jobs >= 1, "jobs must be >= 1");
  require(spec.history >= 1 && spec.window >= 1 && spec.latent_dim >= 1,
          "history, window and latent_dim must be >= 1");
  require(!spec.hidden.empty(), "hidden must list at least one layer");
  env.validate();
}

json to_json(const StudentConfig& c) {
  json spec = to_json(c.spec);
  for (const char* k : {"seed", "n_joints", "n_keypoints", "oracle_dim"})
    spec.erase(k);
  return {{"seed", c.seed},
          {"iterations", c.iterations},
          {"n_envs", c.n_envs},
          {"horizon", c.horizon},
          {"spec", spec},
          {"beta", c.beta},
          {"lr", c.lr},
          {"epochs", c.epochs},
          {"minibatches", c.minibatches},
          {"max_grad_norm", c.max_grad_norm},
          {"buffer_iterations", c.buffer_iterations},
          {"env", teacher::to_json(c.env)},
          {"eval_every", c.eval_every},
          {"checkpoint_every", c.checkpoint_every},
          {"jobs", c.jobs},
          {"fault_iteration", c.fault_iteration}};
}

StudentConfig student_config_from_json(const json& j) {
  JsonReader r(j, "student_config");
  StudentConfig c;
  r.require("seed", c.seed);
  r.get("iterations", c.iterations);
  r.get("n_envs", c.n_envs);
  r.get("horizon", c.horizon);
  c.spec = student_spec_from_json(r.child("spec"), c.spec);
  r.get("beta", c.beta);
  r.get("lr", c.lr);
  r.get("epochs", c.epochs);
  r.get("minibatches", c.minibatches);
  r.get("max_grad_norm", c.max_grad_norm);
  r.get("buffer_iterations", c.buffer_iterations);
  if (r.has("env")) {
    JsonReader er = r.child("env");
    const bool has_rand = er.has("randomization");
    c.env = teacher::env_config_from_json(er);
    if (!has_rand) c.env.randomization = StudentConfig::default_env().randomization;
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

StudentSpec wire_spec(StudentSpec spec, const sim::RobotModel& model) {
  spec.n_joints = model.n_joints();
  spec.n_keypoints = model.n_keypoints();
  spec.oracle_dim = teacher::oracle_obs_dim(model);
  return spec;
}

StudentPolicy::StudentPolicy(StudentParams params, double action_scale,
                             std::string id)
    : params_(std::move(params)),
      action_scale_(action_scale),
      builder_(params_.spec.history, params_.spec.window,
               params_.spec.n_joints, params_.spec.n_keypoints),
      id_(std::move(id)) {
  reset();
}

void StudentPolicy::reset() {
  builder_.reset();
  prev_action_ = Vec::Zero(params_.spec.n_joints);
}

Vec StudentPolicy::act(const sim::SimState& state,
                       const motion::MotionClip& clip, int frame,
                       const eval::NoiseSpec& noise, Rng& rng) {
  const auto obs = eval::observe(state, noise, rng);
  const Vec raw = builder_.build(obs, prev_action_, clip, frame);
  const Vec a = student_act(params_, raw, params_.spec.latent_mode, &rng).col(0);
  prev_action_ = a;
  return clip.clamped(frame + 1).q + action_scale_ * a;
}

nn::Checkpoint to_checkpoint(const StudentParams& p, json meta) {
  nn::Checkpoint ck;
  ck.kind = "student";
  if (p.spec.arch == StudentArch::kCvae) {
    ck.networks["prior"] = p.prior;
    ck.networks["encoder"] = p.encoder;
    ck.vectors["oracle_mean"] = p.oracle_norm.mean;
    ck.vectors["oracle_var"] = p.oracle_norm.var;
    meta["oracle_count"] = p.oracle_norm.count;
  }
  ck.networks["decoder"] = p.decoder;
  ck.vectors["deploy_mean"] = p.deploy_norm.mean;
  ck.vectors["deploy_var"] = p.deploy_norm.var;
  meta["deploy_count"] = p.deploy_norm.count;
  meta["spec"] = to_json(p.spec);
  ck.meta = std::move(meta);
  return ck;
}

StudentParams student_from_checkpoint(const nn::Checkpoint& ck) {
  if (ck.kind != "student")
    throw InvalidInput("checkpoint kind '" + ck.kind + "' is not student");
  StudentParams p;
  p.spec = student_spec_from_json(JsonReader(ck.meta.at("spec"), "spec"));
  p.decoder = ck.network("decoder");
  p.deploy_norm.mean = ck.vector("deploy_mean");
  p.deploy_norm.var = ck.vector("deploy_var");
  p.deploy_norm.count = ck.meta.value("deploy_count", 0.0);
  if (p.spec.arch == StudentArch::kCvae) {
    p.prior = ck.network("prior");
    p.encoder = ck.network("encoder");
    p.oracle_norm.mean = ck.vector("oracle_mean");
    p.oracle_norm.var = ck.vector("oracle_var");
    p.oracle_norm.count = ck.meta.value("oracle_count", 0.0);
  }
  const auto& s = p.spec;
  const bool ok =
      p.decoder.spec.in_dim() == s.decoder_in_dim() &&
      p.deploy_norm.mean.size() == s.deploy_dim() &&
      (s.arch == StudentArch::kMlp ||
       (p.prior.spec.in_dim() == s.prior_in_dim() &&
        p.encoder.spec.in_dim() == s.encoder_in_dim() &&
        p.oracle_norm.mean.size() == s.oracle_dim));
  if (!ok) throw InvalidInput("student checkpoint: inconsistent dimensions");
  return p;
}

namespace {

struct Chunk {
  Mat deploy;
  Mat oracle;
  Mat labels;
};

Mat gather(const std::vector<const Mat*>& parts, const std::vector<int>& idx,
           const std::vector<std::pair<int, int>>& where) {
  Mat out(parts.front()->rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto [c, col] = where[idx[k]];
    out.col(k) = parts[c]->col(col);
  }
  return out;
}

}  // namespace

StudentTrainOutput train_student(const sim::RobotModel& model,
                                 const std::vector<motion::MotionClip>& clips,
                                 const nn::Checkpoint& teacher_ckpt,
                                 const StudentConfig& config,
                                 const teacher::TrainIo& io) {
  config.validate();
  teacher::check_clips(model, clips);
  const auto tpolicy = teacher::load_teacher_policy(model, teacher_ckpt);
  const teacher::ActorCritic& tac = tpolicy->actor_critic();
  const int n_envs = config.n_envs;
  const int horizon = config.horizon;
  const int act_dim = model.n_joints();

  StudentSpec spec = wire_spec(config.spec, model);
  spec.seed = teacher::derive_seed(config.seed, 0);
  StudentTrainOutput out;
  out.params = make_student(spec);
  const bool cvae = spec.arch == StudentArch::kCvae;
  nn::AdamState adam = nn::make_adam_state(out.params.n_params());
  nn::AdamHyper adam_hyper;
  adam_hyper.lr = config.lr;
  Rng update_rng(teacher::derive_seed(config.seed, 1));

  teacher::EnvConfig env_config = config.env;
  env_config.action_scale = tpolicy->action_scale();
  DeployObsBuilder deploy_proto(spec.history, spec.window, spec.n_joints,
                                spec.n_keypoints);
  teacher::OracleObsBuilder oracle_proto(model);

  json meta = io.extra_meta;
  meta["type"] = "student";
  meta["action_scale"] = env_config.action_scale;
  meta["obs"] = deploy_proto.describe();
  meta["seed"] = config.seed;
  meta["config"] = to_json(config);
  // Results do not depend on the worker count.
  meta["config"].erase("jobs");
  meta["teacher_iterations"] = teacher_ckpt.meta.value("iterations_done", -1);
  auto make_checkpoint = [&](const StudentParams& p, int done) {
    json m = meta;
    m["iterations_done"] = done;
    return to_checkpoint(p, m);
  };
  const bool persist = !io.out_dir.empty();
  const auto ckpt_path = io.out_dir / (io.name + ".json");
  const auto log_path = io.out_dir / (io.name + "_log.jsonl");
  std::string log_text;
  if (persist) write_text_file(log_path, "");

  std::vector<teacher::TrackingEnv> envs;
  std::vector<std::unique_ptr<teacher::ObsBuilder>> deploy_b, oracle_b;
  envs.reserve(n_envs);
  for (int e = 0; e < n_envs; ++e) {
    envs.emplace_back(model, clips, env_config,
                      teacher::derive_seed(config.seed, 2 + e));
    deploy_b.push_back(deploy_proto.clone());
    oracle_b.push_back(oracle_proto.clone());
  }
  std::vector<Vec> cur_d(n_envs), cur_o(n_envs);
  auto observe_env = [&](int e) {
    auto& env = envs[e];
    const auto obs = teacher::exact_observation(env.state());
    cur_d[e] = deploy_b[e]->build(obs, env.prev_action(), env.clip(),
                                  env.frame());
    cur_o[e] = oracle_b[e]->build(obs, env.prev_action(), env.clip(),
                                  env.frame());
  };
  for (int e = 0; e < n_envs; ++e) {
    envs[e].reset();
    observe_env(e);
  }

  std::deque<Chunk> buffer;
  std::vector<teacher::StepResult> results(n_envs);
  for (int it = 0; it < config.iterations; ++it) {
    const double progress =
        static_cast<double>(it) / static_cast<double>(config.iterations);
    Chunk chunk{Mat(spec.deploy_dim(), n_envs * horizon),
                Mat(spec.oracle_dim, n_envs * horizon),
                Mat(act_dim, n_envs * horizon)};
    int episodes = 0;
    int terminations = 0;
    for (int t = 0; t < horizon; ++t) {
      Mat d(spec.deploy_dim(), n_envs), o(spec.oracle_dim, n_envs);
      for (int e = 0; e < n_envs; ++e) {
        d.col(e) = cur_d[e];
        o.col(e) = cur_o[e];
      }
      const Mat labels = teacher::policy_mean(tac, o);
      Mat actions;
      if (spec.latent_mode == LatentMode::kStochastic && cvae) {
        actions.resize(act_dim, n_envs);
        for (int e = 0; e < n_envs; ++e)
          actions.col(e) = student_act(out.params, d.col(e),
                                       LatentMode::kStochastic, &envs[e].rng());
      } else {
        actions = student_act(out.params, d, LatentMode::kDeterministic, nullptr);
      }
      const int base = t * n_envs;
      chunk.deploy.middleCols(base, n_envs) = d;
      chunk.oracle.middleCols(base, n_envs) = o;
      chunk.labels.middleCols(base, n_envs) = labels;
      parallel_for(n_envs, config.jobs, [&](int e) {
        auto& env = envs[e];
        results[e] = env.step(actions.col(e), progress);
        if (results[e].done) {
          env.reset();
          deploy_b[e]->reset();
          oracle_b[e]->reset();
        }
        observe_env(e);
      });
      for (const auto& r : results) {
        if (!r.done) continue;
        ++episodes;
        if (!r.truncated) ++terminations;
      }
    }
    out.env_steps += static_cast<long>(n_envs) * horizon;

    int skipped = 0;
    for (Eigen::Index c = 0; c < chunk.labels.cols(); ++c)
      if (!chunk.labels.col(c).allFinite()) ++skipped;
    out.params.deploy_norm.update(chunk.deploy);
    if (cvae) out.params.oracle_norm.update(chunk.oracle);
    buffer.push_back(std::move(chunk));
    while (static_cast<int>(buffer.size()) > config.buffer_iterations)
      buffer.pop_front();

    std::vector<const Mat*> dp, op, lp;
    std::vector<std::pair<int, int>> where;
    for (std::size_t c = 0; c < buffer.size(); ++c) {
      dp.push_back(&buffer[c].deploy);
      op.push_back(&buffer[c].oracle);
      lp.push_back(&buffer[c].labels);
      for (Eigen::Index k = 0; k < buffer[c].labels.cols(); ++k)
        where.emplace_back(static_cast<int>(c), static_cast<int>(k));
    }
    const int n = static_cast<int>(where.size());
    const int mb = std::max(1, n / config.minibatches);
    std::vector<int> order(n);
    double l_action = 0.0, l_kl = 0.0, total = 0.0, grad_norm = 0.0;
    int updates = 0;
    auto halt = [&](const std::string& why) {
      out.checkpoint = make_checkpoint(out.params, it);
      if (persist) nn::save_checkpoint(out.checkpoint, ckpt_path);
      throw teacher::TrainingDiverged(
          "student training diverged at iteration " + std::to_string(it) +
              ": " + why + "; kept parameters after iteration " +
              std::to_string(it - 1),
          it - 1);
    };
    StudentParams trial = out.params;
    nn::AdamState trial_adam = adam;
    Vec flat = trial.pack();
    for (int ep = 0; ep < config.epochs; ++ep) {
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), update_rng);
      for (int m = 0; m < config.minibatches; ++m) {
        const int lo = m * mb;
        const int hi = m + 1 == config.minibatches ? n : lo + mb;
        if (lo >= hi) continue;
        const std::vector<int> idx(order.begin() + lo, order.begin() + hi);
        const Mat d = trial.deploy_norm.normalize(gather(dp, idx, where));
        const Mat labels = gather(lp, idx, where);
        Mat o, noise;
        if (cvae) {
          o = trial.oracle_norm.normalize(gather(op, idx, where));
          noise.resize(spec.latent_dim, static_cast<Eigen::Index>(idx.size()));
          for (Eigen::Index c = 0; c < noise.cols(); ++c)
            noise.col(c) = normal_vec(update_rng, spec.latent_dim);
        }
        Vec grad;
        const DistillLoss loss =
            distill_loss(trial, d, o, labels, noise, config.beta, &grad);
        if (it == config.fault_iteration)
          grad.setConstant(std::numeric_limits<double>::quiet_NaN());
        if (!std::isfinite(loss.total) || !grad.allFinite())
          halt("non-finite distillation loss or gradient");
        grad_norm += nn::clip_grad_norm(grad, config.max_grad_norm);
        nn::adam_step(flat, grad, trial_adam, adam_hyper);
        trial.unpack(flat);
        l_action += loss.l_action;
        l_kl += loss.l_kl;
        total += loss.total;
        ++updates;
      }
    }
    if (!flat.allFinite()) halt("non-finite parameters");
    out.params = std::move(trial);
    adam = std::move(trial_adam);

    const double inv = updates > 0 ? 1.0 / updates : 0.0;
    json rec = {{"iteration", it},
                {"executed", "student"},
                {"l_action", l_action * inv},
                {"l_kl", l_kl * inv},
                {"total", total * inv},
                {"grad_norm", grad_norm * inv},
                {"skipped_labels", skipped},
                {"samples", n},
                {"episodes", episodes},
                {"terminations", terminations},
                {"env_steps", out.env_steps}};
    const bool last = it + 1 == config.iterations;
    if (config.eval_every > 0 && ((it + 1) % config.eval_every == 0 || last)) {
      StudentPolicy policy(out.params, env_config.action_scale);
      const auto agg =
          eval::evaluate_suite(model, policy, clips, {}, {config.seed})
              .summary();
      rec["sr"] = agg.sr;
      rec["mpkpe"] = agg.mpkpe_all;
    }
    if (persist) {
      log_text += rec.dump() + "\n";
      write_text_file(log_path, log_text);
      if (config.checkpoint_every > 0 && (it + 1) % config.checkpoint_every == 0)
        nn::save_checkpoint(make_checkpoint(out.params, it + 1), ckpt_path);
    }
    out.log.push_back(std::move(rec));
  }
  out.checkpoint = make_checkpoint(out.params, config.iterations);
  if (persist) nn::save_checkpoint(out.checkpoint, ckpt_path);
  return out;
}

std::unique_ptr<eval::Policy> load_policy(const sim::RobotModel& model,
                                          const nn::Checkpoint& ckpt) {
  if (ckpt.kind == "student") {
    auto params = student_from_checkpoint(ckpt);
    if (params.spec.n_joints != model.n_joints() ||
        params.spec.n_keypoints != model.n_keypoints())
      throw InvalidInput("student checkpoint does not match the robot");
    const std::string id =
        params.spec.arch == StudentArch::kCvae ? "student" : "dagger_mlp";
    return std::make_unique<StudentPolicy>(
        std::move(params), ckpt.meta.at("action_scale").get<double>(), id);
  }
  if (ckpt.kind == "ppo_policy") {
    const json obs = ckpt.meta.value("obs", json::object());
    const std::string type = obs.value("type", "");
    if (type == "oracle") return teacher::load_teacher_policy(model, ckpt);
    if (type == "deploy") {
      auto builder = std::make_unique<DeployObsBuilder>(
          obs.at("history").get<int>(), obs.at("window").get<int>(),
          model.n_joints(), model.n_keypoints());
      return std::make_unique<teacher::PpoPolicy>(
          teacher::actor_critic_from_checkpoint(ckpt),
          ckpt.meta.at("action_scale").get<double>(), std::move(builder),
          "scratch");
    }
    throw InvalidInput("ppo_policy checkpoint with unknown observation type '" +
                       type + "'");
  }
  throw InvalidInput("checkpoint kind '" + ckpt.kind + "' is not a policy");
}

}  // namespace wbt::student
