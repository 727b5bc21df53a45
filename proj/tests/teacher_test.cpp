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

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "wbt/motion/generate.hpp"
#include "wbt/sim/kinematics.hpp"
#include "wbt/sim/simulator.hpp"
#include "wbt/teacher/env.hpp"
#include "wbt/teacher/obs.hpp"
#include "wbt/teacher/ppo.hpp"
#include "wbt/teacher/reward.hpp"
#include "wbt/teacher/train.hpp"

namespace wbt::teacher {
namespace {

const sim::RobotModel& biped() {
  static const sim::RobotModel m = sim::default_biped();
  return m;
}

motion::MotionClip make_clip(motion::ClipKind kind, double amp,
                             double seconds) {
  Rng rng(3);
  motion::GeneratorParams p;
  p.amplitude = amp;
  auto c = motion::generate_clip(kind, p, 50.0, seconds, rng, biped());
  c.name = motion::to_string(kind);
  return c;
}

// Moves a state by a planar rigid motion: rotation phi, then translation t.
sim::SimState moved(const sim::SimState& s, double phi, const Vec2& t) {
  sim::SimState o = s;
  o.root_pos = rot2(phi) * s.root_pos + t;
  o.root_angle = s.root_angle + phi;
  o.root_linvel = rot2(phi) * s.root_linvel;
  return o;
}

motion::Frame moved(const motion::Frame& f, double phi, const Vec2& t) {
  motion::Frame o = f;
  o.root_pos = rot2(phi) * f.root_pos + t;
  o.root_angle = f.root_angle + phi;
  o.root_linvel = rot2(phi) * f.root_linvel;
  o.keypoints = (rot2(phi) * f.keypoints).colwise() + t;
  return o;
}

sim::SimState perturbed_state(const motion::Frame& f, Rng& rng) {
  sim::SimState s = sim::state_from_frame(f);
  s.root_pos += Vec2(normal(rng, 0, 0.05), normal(rng, 0, 0.05));
  s.root_angle += normal(rng, 0, 0.1);
  s.root_linvel += Vec2(normal(rng), normal(rng));
  s.root_angvel += normal(rng);
  for (int i = 0; i < s.q.size(); ++i) {
    s.q(i) += normal(rng, 0, 0.1);
    s.qdot(i) += normal(rng);
  }
  return s;
}

TEST(OracleObs, Dimensions) {
  EXPECT_EQ(oracle_proprio_dim(biped()), 59);
  EXPECT_EQ(oracle_goal_dim(biped()), 64);
  EXPECT_EQ(oracle_obs_dim(biped()), 123);
}

TEST(OracleObs, InvariantUnderCommonRigidMotion) {
  const auto clip = make_clip(motion::ClipKind::kWalk, 1.0, 1.0);
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int f = trial % (clip.size() - 1);
    const auto state = perturbed_state(clip.at(f), rng);
    const Vec prev = normal_vec(rng, 7);
    const double phi = uniform(rng, -kPi, kPi);
    const Vec2 t(uniform(rng, -5, 5), uniform(rng, -1, 1));
    const Vec a = oracle_obs_against(biped(), state, prev, clip.at(f + 1)).flat();
    const Vec b = oracle_obs_against(biped(), moved(state, phi, t), prev,
                                     moved(clip.at(f + 1), phi, t))
                      .flat();
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-9) << "trial " << trial;
  }
}

TEST(OracleObs, GoalDifferencesVanishOnReference) {
  const auto clip = make_clip(motion::ClipKind::kSquat, 1.0, 1.0);
  const int f = 10;
  const auto state = sim::state_from_frame(clip.at(f + 1));
  const auto obs =
      build_oracle_obs(biped(), state, Vec::Zero(7), clip, f);
  // keypoint, joint, link angle, keypoint velocity and angular velocity
  // differences, then the root angle difference at the end
  const int diffs = 16 + 7 + 7 + 16 + 1;
  EXPECT_LT(obs.goal.head(diffs).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(obs.goal(obs.goal.size() - 1), 0.0, 1e-12);
}

TEST(OracleObs, RootOffsetShowsInKeypointDifferences) {
  const auto clip = make_clip(motion::ClipKind::kSquat, 0.0, 1.0);
  auto state = sim::state_from_frame(clip.at(1));
  state.root_angle = 0.0;
  motion::Frame ref = clip.at(1);
  ref.root_angle = 0.0;
  ref.keypoints = sim::forward_kinematics(biped(), ref.root_pos, 0.0, ref.q);
  state.root_pos.x() += 0.1;
  const auto obs = oracle_obs_against(biped(), state, Vec::Zero(7), ref);
  for (int k = 0; k < 8; ++k) {
    EXPECT_NEAR(obs.goal(2 * k), -0.1, 1e-12);
    EXPECT_NEAR(obs.goal(2 * k + 1), 0.0, 1e-12);
  }
}

TEST(OracleObs, FrameWithoutSuccessorIsRejected) {
  const auto clip = make_clip(motion::ClipKind::kSquat, 0.0, 0.2);
  const auto state = sim::state_from_frame(clip.at(0));
  EXPECT_THROW(build_oracle_obs(biped(), state, Vec::Zero(7), clip,
                                clip.size() - 1),
               InvalidInput);
  EXPECT_THROW(build_oracle_obs(biped(), state, Vec::Zero(7), clip, -1),
               InvalidInput);
  OracleObsBuilder builder(biped());
  const Vec at_end = builder.build(exact_observation(state), Vec::Zero(7),
                                   clip, clip.size() - 1);
  EXPECT_EQ(at_end.size(), 123);
}

TEST(Reward, OnReferenceWithoutPenaltiesEqualsTaskSum) {
  const auto clip = make_clip(motion::ClipKind::kSquat, 1.0, 1.0);
  const auto& ref = clip.at(5);
  const auto state = sim::state_from_frame(ref);
  RewardWeights w;
  const auto r = compute_reward(biped(), state, Vec::Ones(7), Vec::Zero(7),
                                Vec::Constant(7, 50.0), ref, w, 0.0);
  EXPECT_EQ(r.multiplier, 0.0);
  EXPECT_NEAR(r.total, w.task_sum(), 1e-12);
}

TEST(Reward, KeypointOffsetFollowsKernel) {
  const auto clip = make_clip(motion::ClipKind::kSquat, 0.0, 1.0);
  const auto& ref = clip.at(5);
  auto state = sim::state_from_frame(ref);
  state.root_pos.x() += 0.1;
  RewardWeights w;
  const auto r = compute_reward(biped(), state, Vec::Zero(7), Vec::Zero(7),
                                Vec::Zero(7), ref, w, 0.0);
  // every keypoint is 0.1 m off: mean squared distance 0.01
  EXPECT_NEAR(r.kp, w.w_kp * std::exp(-0.01 / (0.3 * 0.3)), 1e-12);
  EXPECT_NEAR(r.jpos, w.w_jpos, 1e-12);
  EXPECT_NEAR(r.jvel, w.w_jvel, 1e-12);
  EXPECT_NEAR(r.linvel, w.w_linvel, 1e-12);
}

TEST(Reward, ActionRatePenaltyFollowsCurriculum) {
  const auto clip = make_clip(motion::ClipKind::kSquat, 0.0, 1.0);
  const auto& ref = clip.at(5);
  auto state = sim::state_from_frame(ref);
  state.root_pos(1) += 1.0;  // airborne: no contact, no slip
  RewardWeights w;
  Vec a = Vec::Zero(7);
  a(0) = 3.0;
  a(1) = 4.0;
  const auto r = compute_reward(biped(), state, a, Vec::Zero(7), Vec::Zero(7),
                                ref, w, 0.25);
  EXPECT_DOUBLE_EQ(r.multiplier, 0.5);
  EXPECT_NEAR(r.action_rate, -0.5 * 0.1 * 5.0, 1e-12);
  EXPECT_EQ(r.slip, 0.0);
  EXPECT_NEAR(r.total,
              r.kp + r.jpos + r.jvel + r.linvel + r.action_rate + r.torque +
                  r.slip,
              1e-15);
}

TEST(Reward, CurriculumIsMonotone) {
  Curriculum c;
  double last = -1.0;
  for (double p = 0.0; p <= 1.0; p += 0.01) {
    const double m = c.multiplier(p);
    EXPECT_GE(m, last);
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 1.0);
    last = m;
  }
  EXPECT_EQ(c.multiplier(0.5), 1.0);
  EXPECT_EQ(Curriculum{0.0}.multiplier(0.0), 1.0);
}

RolloutBatch one_env_batch(const std::vector<double>& rewards,
                           const std::vector<double>& values) {
  RolloutBatch b;
  const int h = static_cast<int>(rewards.size());
  b.resize(1, h, 1, 1);
  for (int t = 0; t < h; ++t) {
    b.rewards(t) = rewards[t];
    b.values(t) = values[t];
  }
  b.bootstrap.setZero();
  return b;
}

TEST(Gae, ZeroGammaGivesOneStepAdvantage) {
  auto b = one_env_batch({1.0, 2.0, 3.0}, {0.5, 0.25, 4.0});
  b.bootstrap(2) = 10.0;
  const auto adv = gae(b, 0.0, 0.95);
  EXPECT_DOUBLE_EQ(adv.advantages(0), 0.5);
  EXPECT_DOUBLE_EQ(adv.advantages(1), 1.75);
  EXPECT_DOUBLE_EQ(adv.advantages(2), -1.0);
}

TEST(Gae, TerminalStepIgnoresNextValue) {
  auto b = one_env_batch({2.0}, {0.5});
  b.dones[0] = 1;
  b.reasons[0] = "fell";
  b.bootstrap(0) = 100.0;
  const auto adv = gae(b, 0.99, 0.95);
  EXPECT_DOUBLE_EQ(adv.advantages(0), 1.5);
  EXPECT_DOUBLE_EQ(adv.returns(0), 2.0);
}

TEST(Gae, ThreeStepHandExample) {
  // gamma 0.9, lambda 0.8, horizon end bootstraps V = 2
  // delta2 = 1 + 0.9*2 - 1 = 1.8
  // delta1 = 0 + 0.9*1 - 0.5 = 0.4, A1 = 0.4 + 0.72*1.8 = 1.696
  // delta0 = 1 + 0.9*0.5 - 0 = 1.45, A0 = 1.45 + 0.72*1.696 = 2.67112
  auto b = one_env_batch({1.0, 0.0, 1.0}, {0.0, 0.5, 1.0});
  b.bootstrap(2) = 2.0;
  const auto adv = gae(b, 0.9, 0.8);
  EXPECT_NEAR(adv.advantages(2), 1.8, 1e-14);
  EXPECT_NEAR(adv.advantages(1), 1.696, 1e-14);
  EXPECT_NEAR(adv.advantages(0), 2.67112, 1e-14);
}

TEST(Gae, TruncationBootstrapsAndStopsCarry) {
  auto b = one_env_batch({1.0, 1.0}, {0.0, 0.0});
  b.dones[0] = 1;
  b.truncated[0] = 1;
  b.reasons[0] = "end_of_clip";
  b.bootstrap(0) = 3.0;
  b.bootstrap(1) = 0.0;
  const auto adv = gae(b, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(adv.advantages(0), 1.0 + 0.5 * 3.0);
  EXPECT_DOUBLE_EQ(adv.advantages(1), 1.0);
}

TEST(Gae, LambdaOneEqualsDiscountedReturnMinusValue) {
  Rng rng(5);
  const int h = 40;
  RolloutBatch b;
  b.resize(3, h, 1, 1);
  for (int i = 0; i < b.size(); ++i) {
    b.rewards(i) = normal(rng);
    b.values(i) = normal(rng);
    b.bootstrap(i) = normal(rng);
  }
  b.dones[b.index(17, 1)] = 1;
  b.reasons[b.index(17, 1)] = "fell";
  const double gamma = 0.97;
  const auto adv = gae(b, gamma, 1.0);
  for (int e = 0; e < 3; ++e) {
    double ret = b.bootstrap(b.index(h - 1, e));
    for (int t = h - 1; t >= 0; --t) {
      const int i = b.index(t, e);
      if (b.dones[i]) ret = 0.0;
      ret = b.rewards(i) + gamma * ret;
      EXPECT_NEAR(adv.advantages(i), ret - b.values(i), 1e-10);
    }
  }
}

struct PpoFixture {
  ActorCritic ac;
  Mat obs, actions;
  Vec old_lp, adv, ret;
};

PpoFixture ppo_fixture(int n) {
  PpoFixture f;
  f.ac = make_actor_critic(4, 2, {8, 8}, nn::Activation::kTanh, -0.5, 9);
  Rng rng(4);
  f.obs.resize(4, n);
  f.actions.resize(2, n);
  f.old_lp.resize(n);
  f.adv.resize(n);
  f.ret.resize(n);
  for (int i = 0; i < n; ++i) {
    f.obs.col(i) = normal_vec(rng, 4);
    f.actions.col(i) = normal_vec(rng, 2) * 0.5;
    const Vec mean = nn::forward_one(f.ac.actor, f.obs.col(i));
    // spread the ratios across both sides of the clip range
    f.old_lp(i) = gaussian_log_prob(mean, f.ac.log_std, f.actions.col(i)) +
                  normal(rng, 0, 0.3);
    f.adv(i) = normal(rng);
    f.ret(i) = normal(rng);
  }
  return f;
}

TEST(Ppo, LossGradientMatchesFiniteDifferences) {
  auto f = ppo_fixture(12);
  PpoHyper h;
  h.entropy_coef = 0.01;
  Vec grad;
  ppo_loss(f.ac, f.obs, f.actions, f.old_lp, f.adv, f.ret, h, &grad);
  const Vec p0 = f.ac.pack();
  const double eps = 1e-6;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p0.size(); ++i) {
    ActorCritic a = f.ac, b = f.ac;
    Vec pa = p0, pb = p0;
    pa(i) += eps;
    pb(i) -= eps;
    a.unpack(pa);
    b.unpack(pb);
    const double fd =
        (ppo_loss(a, f.obs, f.actions, f.old_lp, f.adv, f.ret, h).total -
         ppo_loss(b, f.obs, f.actions, f.old_lp, f.adv, f.ret, h).total) /
        (2 * eps);
    const double scale = std::max({std::abs(fd), std::abs(grad(i)), 1e-3});
    worst = std::max(worst, std::abs(fd - grad(i)) / scale);
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Ppo, RatioIsOneBeforeTheFirstStep) {
  auto f = ppo_fixture(64);
  RolloutBatch b;
  b.resize(8, 8, 4, 2);
  b.obs = f.obs;
  b.actions = f.actions;
  for (int i = 0; i < 64; ++i) {
    const Vec mean = nn::forward_one(f.ac.actor, f.obs.col(i));
    b.log_probs(i) = gaussian_log_prob(mean, f.ac.log_std, f.actions.col(i));
  }
  b.rewards = f.adv;
  const auto adv = gae(b, 0.99, 0.95);
  nn::AdamState adam = nn::make_adam_state(f.ac.n_params());
  Rng rng(1);
  const auto stats = ppo_update(f.ac, adam, b, adv, PpoHyper{}, rng);
  EXPECT_LT(stats.first_ratio_dev, 1e-12);
}

TEST(Ppo, ZeroAdvantageLeavesActorUnchanged) {
  auto f = ppo_fixture(32);
  RolloutBatch b;
  b.resize(4, 8, 4, 2);
  b.obs = f.obs;
  b.actions = f.actions;
  b.log_probs = f.old_lp;
  Advantages adv{Vec::Zero(32), f.ret};
  PpoHyper h;
  h.normalize_advantages = false;
  const nn::Mlp actor = f.ac.actor;
  const Vec log_std = f.ac.log_std;
  nn::AdamState adam = nn::make_adam_state(f.ac.n_params());
  Rng rng(1);
  ppo_update(f.ac, adam, b, adv, h, rng);
  EXPECT_EQ(f.ac.actor.params, actor.params);
  EXPECT_EQ(f.ac.log_std, log_std);
}

TEST(Ppo, NonFiniteBatchLeavesParametersUntouched) {
  auto f = ppo_fixture(16);
  RolloutBatch b;
  b.resize(4, 4, 4, 2);
  b.obs = f.obs;
  b.actions = f.actions;
  b.log_probs = f.old_lp;
  Advantages adv{f.adv, f.ret};
  adv.returns(3) = std::nan("");
  const Vec before = f.ac.pack();
  nn::AdamState adam = nn::make_adam_state(f.ac.n_params());
  Rng rng(1);
  EXPECT_THROW(ppo_update(f.ac, adam, b, adv, PpoHyper{}, rng),
               NumericalDivergence);
  EXPECT_EQ(f.ac.pack(), before);
  EXPECT_EQ(adam.step, 0);
}

TEST(Ppo, SolvesOneDimensionalBandit) {
  // reward -(a - 0.7)^2 for a constant observation; the mean should move
  // to 0.7
  auto ac = make_actor_critic(1, 1, {16}, nn::Activation::kTanh, -1.0, 3);
  nn::AdamState adam = nn::make_adam_state(ac.n_params());
  PpoHyper h;
  h.lr = 3e-3;
  h.reward_scale = 1.0;
  Rng rng(8), update_rng(9);
  const int n = 64;
  for (int it = 0; it < 200; ++it) {
    RolloutBatch b;
    b.resize(n, 1, 1, 1);
    b.obs.setOnes();
    const double mean = nn::forward_one(ac.actor, Vec::Ones(1))(0);
    const double value = nn::forward_one(ac.critic, Vec::Ones(1))(0);
    const double sd = std::exp(ac.log_std(0));
    for (int i = 0; i < n; ++i) {
      const double a = mean + sd * normal(rng);
      b.actions(0, i) = a;
      b.log_probs(i) = gaussian_log_prob(Vec::Constant(1, mean), ac.log_std,
                                         Vec::Constant(1, a));
      b.rewards(i) = -(a - 0.7) * (a - 0.7);
      b.values(i) = value;
      b.dones[i] = 1;
      b.reasons[i] = "end";
    }
    const auto adv = gae(b, h.gamma, h.lambda);
    ppo_update(ac, adam, b, adv, h, update_rng);
  }
  EXPECT_NEAR(nn::forward_one(ac.actor, Vec::Ones(1))(0), 0.7, 0.05);
}

TEST(Env, TruncatesAtTheFinalFrame) {
  const std::vector<motion::MotionClip> clips{
      make_clip(motion::ClipKind::kSquat, 0.0, 0.5)};
  TrackingEnv env(biped(), clips, EnvConfig{}, 1);
  env.reset_to(0, clips[0].size() - 2);
  const auto r = env.step(Vec::Zero(7), 0.0);
  EXPECT_TRUE(r.done);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.reason, "end_of_clip");
}

TEST(Env, ZeroResidualHoldsTheStance) {
  const std::vector<motion::MotionClip> clips{
      make_clip(motion::ClipKind::kSquat, 0.0, 1.0)};
  TrackingEnv env(biped(), clips, EnvConfig{}, 1);
  env.reset_to(0, 0);
  for (int t = 0; t + 1 < clips[0].size(); ++t) {
    const auto r = env.step(Vec::Zero(7), 0.0);
    if (t + 2 < clips[0].size()) {
      ASSERT_FALSE(r.done) << r.reason;
    }
  }
}

TEST(Env, RejectsClipsAtTheWrongRate) {
  auto clip = make_clip(motion::ClipKind::kSquat, 0.0, 0.5);
  clip.fps = 30.0;
  EXPECT_THROW(check_clips(biped(), {clip}), InvalidInput);
}

TeacherConfig tiny_config() {
  TeacherConfig c;
  c.seed = 5;
  c.iterations = 3;
  c.n_envs = 4;
  c.horizon = 8;
  c.hidden = {16, 16};
  c.ppo.epochs = 2;
  c.ppo.minibatches = 2;
  return c;
}

std::vector<motion::MotionClip> tiny_clips() {
  return {make_clip(motion::ClipKind::kSquat, 0.0, 0.6),
          make_clip(motion::ClipKind::kSquat, 1.0, 0.6)};
}

TEST(TrainTeacher, ZeroIterationsReturnsInitialization) {
  auto c = tiny_config();
  c.iterations = 0;
  const auto out = train_teacher(biped(), tiny_clips(), c);
  const auto init = make_actor_critic(123, 7, c.hidden, c.activation,
                                      c.init_log_std, derive_seed(c.seed, 0));
  EXPECT_EQ(out.ac.pack(), init.pack());
  EXPECT_TRUE(out.log.empty());
}

TEST(TrainTeacher, SameSeedGivesIdenticalLogsAndCheckpoints) {
  const auto clips = tiny_clips();
  auto c = tiny_config();
  c.eval_every = 3;
  const auto a = train_teacher(biped(), clips, c);
  const auto b = train_teacher(biped(), clips, c);
  c.jobs = 2;
  const auto d = train_teacher(biped(), clips, c);
  ASSERT_EQ(a.log.size(), 3u);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].dump(), b.log[i].dump());
    EXPECT_EQ(a.log[i].dump(), d.log[i].dump());
  }
  EXPECT_EQ(nn::checkpoint_to_string(a.checkpoint),
            nn::checkpoint_to_string(b.checkpoint));
  EXPECT_EQ(a.ac.pack(), d.ac.pack());
  c.seed = 6;
  c.jobs = 1;
  const auto e = train_teacher(biped(), clips, c);
  EXPECT_NE(a.ac.pack(), e.ac.pack());
}

TEST(TrainTeacher, DivergenceKeepsLastGoodCheckpoint) {
  const auto dir = std::filesystem::temp_directory_path() / "wbt_teacher_div";
  std::filesystem::create_directories(dir);
  auto c = tiny_config();
  c.fault_iteration = 1;
  TrainIo io;
  io.out_dir = dir;
  try {
    train_teacher(biped(), tiny_clips(), c, io);
    FAIL() << "expected TrainingDiverged";
  } catch (const TrainingDiverged& e) {
    EXPECT_EQ(e.last_good_iteration(), 0);
  }
  const auto ck = nn::load_checkpoint(dir / "teacher.json");
  EXPECT_EQ(ck.meta.at("iterations_done").get<int>(), 1);
  EXPECT_TRUE(actor_critic_from_checkpoint(ck).pack().allFinite());
  std::filesystem::remove_all(dir);
}

TEST(TrainTeacher, CheckpointRebuildsTheSamePolicy) {
  auto c = tiny_config();
  c.iterations = 1;
  const auto out = train_teacher(biped(), tiny_clips(), c);
  const auto ck =
      nn::checkpoint_from_string(nn::checkpoint_to_string(out.checkpoint));
  const auto ac = actor_critic_from_checkpoint(ck);
  EXPECT_EQ(ac.pack(), out.ac.pack());
  EXPECT_EQ(ac.obs_norm.mean, out.ac.obs_norm.mean);
  EXPECT_EQ(ac.obs_norm.var, out.ac.obs_norm.var);
  auto policy = load_teacher_policy(biped(), ck);
  EXPECT_EQ(policy->action_scale(), 0.25);
}

TEST(TeacherConfigJson, RoundTripsAndValidates) {
  auto c = tiny_config();
  c.env.pushes = false;
  c.ppo.lr = 1e-3;
  const auto j = to_json(c);
  const auto back = teacher_config_from_json(j);
  EXPECT_EQ(to_json(back).dump(), j.dump());

  auto missing_seed = j;
  missing_seed.erase("seed");
  EXPECT_THROW(teacher_config_from_json(missing_seed), ConfigError);
  auto unknown = j;
  unknown["ppo"]["lr_typo"] = 1;
  try {
    teacher_config_from_json(unknown);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("teacher.ppo.lr_typo"),
              std::string::npos);
  }
  auto bad = j;
  bad["n_envs"] = 0;
  EXPECT_THROW(teacher_config_from_json(bad), ConfigError);
}

}  // namespace
}  // namespace wbt::teacher
