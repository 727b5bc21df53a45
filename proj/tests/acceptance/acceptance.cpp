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

// Acceptance run: one PASS/FAIL line per criterion.
//
//   wbtrack_acceptance [--strict] [--out DIR] [criterion ...]
//
// Without criterion numbers all nine run. The exit status is 0 when every
// selected criterion was evaluated; --strict also makes any FAIL non-zero.

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wbt/app/pipeline.hpp"
#include "wbt/app/run_config.hpp"
#include "wbt/eval/ablation.hpp"
#include "wbt/eval/robustness.hpp"
#include "wbt/motion/generate.hpp"
#include "wbt/motion/retarget.hpp"
#include "wbt/nn/gaussian.hpp"
#include "wbt/sim/dynamics.hpp"
#include "wbt/sim/kinematics.hpp"
#include "wbt/sim/simulator.hpp"
#include "wbt/student/cvae.hpp"
#include "wbt/student/distill.hpp"
#include "wbt/teacher/ppo.hpp"
#include "wbt/teacher/train.hpp"

namespace wbt {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const sim::RobotModel& biped() {
  static const sim::RobotModel m = sim::default_biped();
  return m;
}

// ---------------------------------------------------------------- shared runs

motion::MotionClip gen(Rng& rng, motion::ClipKind kind, double amp,
                       double period, const char* name) {
  motion::GeneratorParams p;
  p.amplitude = amp;
  p.period = period;
  auto c = motion::generate_clip(kind, p, 50.0, 4.0, rng, biped());
  c.name = name;
  return c;
}

// Stand, squat, wave, slow walk and turn.
const std::vector<motion::MotionClip>& five_clips() {
  static const auto clips = [] {
    Rng rng(1);
    using motion::ClipKind;
    std::vector<motion::MotionClip> v;
    v.push_back(gen(rng, ClipKind::kSquat, 0.0, 0.0, "stand"));
    v.push_back(gen(rng, ClipKind::kSquat, 1.0, 0.0, "squat"));
    v.push_back(gen(rng, ClipKind::kWave, 0.6, 0.0, "wave"));
    v.push_back(gen(rng, ClipKind::kWalk, 0.6, 1.6, "walk_slow"));
    v.push_back(gen(rng, ClipKind::kTurn, 1.0, 0.0, "turn"));
    return v;
  }();
  return clips;
}

// Held-out candidates, fixed before any student was trained.
const std::vector<motion::MotionClip>& held_out_candidates() {
  static const auto clips = [] {
    Rng rng(7);
    using motion::ClipKind;
    std::vector<motion::MotionClip> v;
    v.push_back(gen(rng, ClipKind::kKick, 0.5, 0.0, "kick05"));
    v.push_back(gen(rng, ClipKind::kKick, 1.0, 0.0, "kick10"));
    v.push_back(gen(rng, ClipKind::kWalk, 0.8, 1.2, "walk_fast"));
    v.push_back(gen(rng, ClipKind::kSquat, 0.6, 1.5, "squat_fast"));
    v.push_back(gen(rng, ClipKind::kWave, 0.4, 1.0, "wave_fast"));
    return v;
  }();
  return clips;
}

teacher::TeacherConfig five_clip_teacher_config() {
  teacher::TeacherConfig c;
  c.seed = 1;
  c.iterations = 400;
  c.n_envs = 32;
  c.horizon = 32;
  c.hidden = {128, 128};
  c.ppo.lr = 3e-4;
  return c;
}

student::StudentConfig student_config(std::uint64_t seed, bool explicit_ref,
                                      int iterations = 50) {
  student::StudentConfig c;
  c.seed = seed;
  c.iterations = iterations;
  c.beta = 0.1;
  c.spec.latent_dim = 64;
  c.spec.window = 5;
  c.spec.history = 10;
  c.spec.hidden = {128, 128};
  c.spec.explicit_ref = explicit_ref;
  return c;
}

class Runs {
 public:
  explicit Runs(fs::path out) : out_(std::move(out)) {}

  const nn::Checkpoint& teacher(double* train_seconds = nullptr) {
    if (!teacher_) {
      const auto t0 = Clock::now();
      teacher::TrainIo io;
      io.out_dir = out_;
      io.name = "teacher_five_clip";
      teacher_ = teacher::train_teacher(biped(), five_clips(),
                                        five_clip_teacher_config(), io)
                     .checkpoint;
      teacher_seconds_ = seconds_since(t0);
    }
    if (train_seconds) *train_seconds = teacher_seconds_;
    return *teacher_;
  }

  const nn::Checkpoint& student(std::uint64_t seed, bool explicit_ref) {
    const auto key = std::make_pair(seed, explicit_ref);
    auto it = students_.find(key);
    if (it == students_.end()) {
      const auto t0 = Clock::now();
      auto ck = student::train_student(biped(), five_clips(), teacher(),
                                       student_config(seed, explicit_ref))
                    .checkpoint;
      std::printf("  trained student seed %llu explicit_ref %d (%.0f s)\n",
                  static_cast<unsigned long long>(seed), explicit_ref ? 1 : 0,
                  seconds_since(t0));
      std::fflush(stdout);
      it = students_.emplace(key, std::move(ck)).first;
    }
    return it->second;
  }

  const fs::path& out() const { return out_; }

 private:
  fs::path out_;
  std::optional<nn::Checkpoint> teacher_;
  double teacher_seconds_ = 0.0;
  std::map<std::pair<std::uint64_t, bool>, nn::Checkpoint> students_;
};

eval::TrackingReport evaluate(const nn::Checkpoint& ck,
                              const std::vector<motion::MotionClip>& clips,
                              int level = 0,
                              std::vector<std::uint64_t> seeds = {0}) {
  auto policy = student::load_policy(biped(), ck);
  return eval::evaluate_suite(biped(), *policy, clips,
                              eval::NoiseSpec::from_level(level), seeds);
}

// ----------------------------------------------------------------- criterion 1

double worst_rel(const Vec& analytic, const Vec& fd, Eigen::Index begin,
                 Eigen::Index end, double floor) {
  double worst = 0.0;
  for (Eigen::Index i = begin; i < end; ++i) {
    const double scale =
        std::max({std::abs(fd(i)), std::abs(analytic(i)), floor});
    worst = std::max(worst, std::abs(fd(i) - analytic(i)) / scale);
  }
  return worst;
}

Vec central_differences(const Vec& p0, const std::function<double(const Vec&)>& f,
                        double eps = 1e-6) {
  Vec g(p0.size());
  for (Eigen::Index i = 0; i < p0.size(); ++i) {
    Vec a = p0, b = p0;
    a(i) += eps;
    b(i) -= eps;
    g(i) = (f(a) - f(b)) / (2 * eps);
  }
  return g;
}

double kl_quadrature_1d(double m1, double s1, double m2, double s2) {
  const int n = 20000;
  const double a = m1 - 14 * s1;
  const double b = m1 + 14 * s1;
  const double h = (b - a) / n;
  auto f = [&](double x) {
    const double lp = -0.5 * std::pow((x - m1) / s1, 2) -
                      std::log(s1 * std::sqrt(2 * kPi));
    const double lq = -0.5 * std::pow((x - m2) / s2, 2) -
                      std::log(s2 * std::sqrt(2 * kPi));
    return std::exp(lp) * (lp - lq);
  };
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3;
}

Verdict criterion_1() {
  // Teacher: clipped surrogate + value loss + entropy on a random batch.
  auto ac = teacher::make_actor_critic(4, 2, {8, 8}, nn::Activation::kTanh,
                                       -0.5, 9);
  Rng rng(4);
  const int n = 12;
  Mat obs(4, n), act(2, n);
  Vec old_lp(n), adv(n), ret(n);
  for (int i = 0; i < n; ++i) {
    obs.col(i) = normal_vec(rng, 4);
    act.col(i) = normal_vec(rng, 2) * 0.5;
    old_lp(i) = teacher::gaussian_log_prob(nn::forward_one(ac.actor, obs.col(i)),
                                           ac.log_std, act.col(i)) +
                normal(rng, 0, 0.3);
    adv(i) = normal(rng);
    ret(i) = normal(rng);
  }
  teacher::PpoHyper h;
  h.entropy_coef = 0.01;
  Vec grad;
  teacher::ppo_loss(ac, obs, act, old_lp, adv, ret, h, &grad);
  const Vec fd = central_differences(ac.pack(), [&](const Vec& p) {
    auto c = ac;
    c.unpack(p);
    return teacher::ppo_loss(c, obs, act, old_lp, adv, ret, h).total;
  });
  const Eigen::Index n_actor = ac.actor.params.size() + ac.log_std.size();
  const double e_actor = worst_rel(grad, fd, 0, n_actor, 1e-3);
  const double e_critic = worst_rel(grad, fd, n_actor, grad.size(), 1e-3);

  // Student: prior, encoder and decoder through the distillation loss.
  student::StudentSpec s;
  s.history = 2;
  s.window = 2;
  s.latent_dim = 3;
  s.hidden = {6};
  s.activation = nn::Activation::kTanh;
  s.seed = 4;
  s.n_joints = 2;
  s.n_keypoints = 2;
  s.oracle_dim = 5;
  auto params = student::make_student(s);
  Rng jr(3);
  Vec flat = params.pack();
  flat += 0.3 * normal_vec(jr, flat.size());
  params.unpack(flat);
  Rng br(4);
  auto m = [&](int r, int c) {
    Mat x(r, c);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(br);
    return x;
  };
  const Mat deploy = m(s.deploy_dim(), 7), oracle = m(s.oracle_dim, 7),
            labels = m(s.n_joints, 7), noise = m(s.latent_dim, 7);
  Vec sgrad;
  student::distill_loss(params, deploy, oracle, labels, noise, 0.1, &sgrad);
  const Vec sfd = central_differences(params.pack(), [&](const Vec& p) {
    auto c = params;
    c.unpack(p);
    return student::distill_loss(c, deploy, oracle, labels, noise, 0.1).total;
  });
  const Eigen::Index np = params.prior.params.size();
  const Eigen::Index ne = params.encoder.params.size();
  const double e_prior = worst_rel(sgrad, sfd, 0, np, 1e-4);
  const double e_enc = worst_rel(sgrad, sfd, np, np + ne, 1e-4);
  const double e_dec = worst_rel(sgrad, sfd, np + ne, sgrad.size(), 1e-4);

  // KL against quadrature, self-KL and non-negativity.
  Rng kr(6);
  double kl_err = 0.0;
  for (int t = 0; t < 100; ++t) {
    Vec m1(3), s1(3), m2(3), s2(3);
    double quad = 0.0;
    for (int i = 0; i < 3; ++i) {
      m1(i) = uniform(kr, -1, 1);
      m2(i) = uniform(kr, -1, 1);
      s1(i) = uniform(kr, 0.3, 2.0);
      s2(i) = uniform(kr, 0.3, 2.0);
      quad += kl_quadrature_1d(m1(i), s1(i), m2(i), s2(i));
    }
    kl_err = std::max(kl_err, std::abs(nn::kl_diag_gauss(m1, s1, m2, s2) - quad));
  }
  double self_max = 0.0, min_kl = INFINITY;
  for (int t = 0; t < 1000; ++t) {
    const int d = 1 + t % 8;
    Vec m1(d), s1(d), m2(d), s2(d);
    for (int i = 0; i < d; ++i) {
      m1(i) = uniform(kr, -3, 3);
      m2(i) = uniform(kr, -3, 3);
      s1(i) = std::exp(uniform(kr, -3, 2));
      s2(i) = std::exp(uniform(kr, -3, 2));
    }
    self_max = std::max(self_max, std::abs(nn::kl_diag_gauss(m1, s1, m1, s1)));
    min_kl = std::min(min_kl, nn::kl_diag_gauss(m1, s1, m2, s2));
  }
  const double grad_worst = std::max({e_actor, e_critic, e_prior, e_enc, e_dec});
  Verdict v;
  v.pass = grad_worst < 1e-4 && kl_err < 1e-6 && self_max == 0.0 &&
           min_kl >= 0.0;
  v.detail = fmt(
      "grad rel err actor %.1e critic %.1e prior %.1e encoder %.1e decoder "
      "%.1e (< 1e-4); KL vs quadrature %.1e (< 1e-6); max KL(p|p) %.1e; "
      "min KL %.3g",
      e_actor, e_critic, e_prior, e_enc, e_dec, kl_err, self_max, min_kl);
  return v;
}

// ----------------------------------------------------------------- criterion 2

Verdict criterion_2() {
  // Pendulum: unit rod about its end, released 0.05 rad from hanging.
  const auto pend = sim::chain_model({1.0}, {1.0});
  const double inertia = 1.0 / 12.0 + 0.25;
  const double omega = std::sqrt(pend.gravity * 0.5 / inertia);
  const double amp = 0.05;
  auto s = sim::rest_state(pend, Vec2::Zero());
  s.q(0) = -kPi / 2 + amp;
  double pend_err = 0.0;
  const double dt = 1e-3;
  for (int k = 1; k <= 500; ++k) {
    s = sim::step(pend, s, s.q, dt);
    const double analytic = amp * std::cos(omega * k * dt);
    pend_err = std::max(pend_err, std::abs(s.q(0) + kPi / 2 - analytic));
  }
  const double pend_rel = pend_err / amp;

  // Rigidity: link lengths under random poses and root placements.
  Rng rng(7);
  double fk_err = 0.0;
  for (int t = 0; t < 1000; ++t) {
    Vec q(biped().n_joints());
    for (int i = 0; i < q.size(); ++i) q(i) = uniform(rng, -3, 3);
    const auto poses = sim::link_poses<double>(
        biped(), Vec2(uniform(rng, -5, 5), uniform(rng, -1, 2)),
        uniform(rng, -3, 3), q);
    for (int i = 0; i < biped().n_links(); ++i)
      fk_err = std::max(fk_err,
                        std::abs((poses.distal[i] - poses.proximal[i]).norm() -
                                 biped().link_lengths[i]));
  }

  // Energy: unactuated frictionless double pendulum, 1 s at dt = 1/200.
  const auto chain = sim::chain_model({0.5, 0.5}, {1.0, 1.0});
  auto c = sim::rest_state(chain, Vec2::Zero());
  c.q << -kPi / 2 + 0.6, 0.4;
  Vec hanging = c.gen_pos();
  hanging.tail(2) << -kPi / 2, 0.0;
  const double floor = sim::potential_energy(chain, hanging);
  auto energy = [&](const sim::SimState& st) {
    return sim::kinetic_energy(chain, st.gen_pos(), st.gen_vel()) +
           sim::potential_energy(chain, st.gen_pos()) - floor;
  };
  // Drift is start versus end; the per-step oscillation of the symplectic
  // integrator is reported alongside.
  const double e0 = energy(c);
  double swing = 0.0;
  for (int k = 0; k < 200; ++k) {
    c = sim::step(chain, c, c.q, sim::kSimDt);
    swing = std::max(swing, std::abs(energy(c) - e0) / e0);
  }
  const double drift = std::abs(energy(c) - e0) / e0;
  Verdict v;
  v.pass = pend_rel < 0.01 && fk_err < 1e-9 && drift < 0.01;
  v.detail = fmt(
      "pendulum max err %.2f%% of amplitude (< 1%%); FK length err %.1e "
      "(< 1e-9); energy drift %.3f%% over 1 s (< 1%%, peak in-run "
      "deviation %.3f%%)",
      100 * pend_rel, fk_err, 100 * drift, 100 * swing);
  return v;
}

// ----------------------------------------------------------------- criterion 3

Verdict criterion_3() {
  using namespace motion;
  const auto& m = biped();
  Rng rng(7);
  GeneratorParams p;
  const auto clip = generate_clip(ClipKind::kWalk, p, 50.0, 2.0, rng, m);
  const auto skel = skeleton_from_robot(m, biped_scale_groups(), 4);
  RetargetWeights w;
  w.w_smooth = 0.0;
  const auto r = retarget_sequence(skel, Vec::Ones(4), to_source_clip(clip, skel),
                                   m, w);
  double sq = 0.0;
  int count = 0;
  for (int t = 0; t < clip.size(); ++t) {
    sq += (r.clip.frames[t].q - clip.frames[t].q).squaredNorm();
    count += m.n_joints();
  }
  const double rms = std::sqrt(sq / count);

  auto big = skel;
  for (auto& o : big.rest_offsets) o *= 2.0;
  const auto fit = fit_shape(big, m);
  const double beta_err = (fit.beta.array() - 0.5).abs().maxCoeff();
  Verdict v;
  v.pass = rms < 1e-4 && beta_err < 1e-3;
  v.detail = fmt("identity round trip RMS %.2e rad (< 1e-4); 2x source "
                 "scales to beta %.4f..%.4f (0.5 +- 1e-3)",
                 rms, fit.beta.minCoeff(), fit.beta.maxCoeff());
  return v;
}

// ----------------------------------------------------------------- criterion 4

Verdict criterion_4(Runs& runs) {
  Rng rng(1);
  motion::GeneratorParams p;
  p.amplitude = 0.0;
  auto stand = motion::generate_clip(motion::ClipKind::kSquat, p, 50.0, 4.0,
                                     rng, biped());
  stand.name = "stand";
  teacher::TeacherConfig c;
  c.seed = 1;
  c.iterations = 200;
  c.n_envs = 32;
  c.horizon = 32;
  c.hidden = {128, 128};
  const auto t0 = Clock::now();
  const auto one = teacher::train_teacher(biped(), {stand}, c);
  const double t_one = seconds_since(t0);
  const auto a1 = evaluate(one.checkpoint, {stand}).summary();

  double t_five = 0.0;
  const auto& teacher = runs.teacher(&t_five);
  const auto a5 = evaluate(teacher, five_clips()).summary();
  Verdict v;
  v.pass = a1.sr == 100.0 && a1.mpkpe_all < 0.05 && a5.sr >= 80.0 &&
           t_five < 30 * 60;
  v.detail = fmt(
      "standing: SR %.0f%% MPKPE %.4f m after 200 it (%.0f s); 5 clips: SR "
      "%.0f%% (>= 80) MPKPE %.4f m after 400 it (%.0f s, budget 30 min)",
      a1.sr, a1.mpkpe_all, t_one, a5.sr, a5.mpkpe_all, t_five);
  return v;
}

// ----------------------------------------------------------------- criterion 5

Verdict criterion_5(Runs& runs) {
  const auto at = evaluate(runs.teacher(), five_clips()).summary();
  const auto as = evaluate(runs.student(1, false), five_clips()).summary();

  // Zero residual and equal log std collapse the KL term exactly.
  student::StudentSpec s;
  s = student::wire_spec(s, biped());
  s.latent_dim = 64;
  s.window = 5;
  s.hidden = {32};
  s.seed = 11;
  auto p = student::make_student(s);
  Rng rng(2);
  Vec flat = p.pack();
  flat += 0.3 * normal_vec(rng, flat.size());
  p.unpack(flat);
  const int l = s.latent_dim, h = s.hidden.back();
  const Eigen::Index out_block = 2 * l * h + 2 * l;
  p.encoder.params.tail(out_block).setZero();
  Eigen::Map<Mat> w(p.prior.params.data() + p.prior.params.size() - out_block,
                    2 * l, h);
  w.bottomRows(l).setZero();
  p.prior.params.tail(l).setZero();
  Rng br(3);
  const int n = 16;
  Mat deploy(s.deploy_dim(), n), oracle(s.oracle_dim, n), labels(s.n_joints, n),
      noise(s.latent_dim, n);
  for (Mat* x : {&deploy, &oracle, &labels, &noise})
    for (Eigen::Index i = 0; i < x->size(); ++i) x->data()[i] = normal(br);
  const auto loss = student::distill_loss(p, deploy, oracle, labels, noise, 0.1);

  Verdict v;
  v.pass = as.sr >= at.sr - 10.0 && as.mpkpe_all <= at.mpkpe_all + 0.05 &&
           std::abs(loss.l_kl) <= 1e-15;
  v.detail = fmt(
      "teacher SR %.0f%% MPKPE %.4f m; student SR %.0f%% MPKPE %.4f m "
      "(within 10 pp and 0.05 m); residual-zero l_kl = %.1e",
      at.sr, at.mpkpe_all, as.sr, as.mpkpe_all, loss.l_kl);
  return v;
}

// ----------------------------------------------------------------- criterion 6

Verdict criterion_6(Runs& runs) {
  // Held-out set: candidates the teacher itself tracks.
  std::vector<motion::MotionClip> held;
  std::string names;
  const auto tr = evaluate(runs.teacher(), held_out_candidates());
  for (std::size_t i = 0; i < tr.rows.size(); ++i)
    if (tr.rows[i].success) {
      held.push_back(held_out_candidates()[i]);
      names += (names.empty() ? "" : ",") + held.back().name;
    }
  if (held.empty()) return {false, "teacher tracks no held-out candidate"};
  const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  double fail[2] = {0.0, 0.0};
  std::string per_seed[2];
  for (int ex = 0; ex < 2; ++ex) {
    for (auto seed : seeds) {
      const auto a = evaluate(runs.student(seed, ex == 1), held).summary();
      fail[ex] += (100.0 - a.sr) / seeds.size();
      per_seed[ex] += fmt("%s%.0f", per_seed[ex].empty() ? "" : "/",
                          100.0 - a.sr);
    }
  }
  Verdict v;
  v.pass = fail[0] <= fail[1];
  v.detail = fmt(
      "held out {%s}, 5 seeds: failure rate without explicit reference %.1f%% "
      "(%s), with %.1f%% (%s); requires without <= with",
      names.c_str(), fail[0], per_seed[0].c_str(), fail[1],
      per_seed[1].c_str());
  return v;
}

// ----------------------------------------------------------------- criterion 7

Verdict criterion_7(Runs& runs) {
  // Noise statistics on a fixed state.
  auto state = sim::state_from_frame(five_clips()[3].at(40));
  double worst_dev = 0.0;
  for (int level : {1, 2}) {
    const auto spec = eval::NoiseSpec::from_level(level);
    const int n = 10000;
    const int j = biped().n_joints();
    Vec sq = Vec::Zero(2 * j + 3);
    Rng rng(99);
    for (int k = 0; k < n; ++k) {
      const auto o = eval::observe(state, spec, rng);
      Vec d(2 * j + 3);
      d.head(j) = o.state.q - state.q;
      d.segment(j, j) = o.state.qdot - state.qdot;
      d(2 * j) = o.state.root_angvel - state.root_angvel;
      d.tail(2) = o.gravity - eval::gravity_in_root(state.root_angle);
      sq += d.cwiseProduct(d);
    }
    const Vec sd = (sq / n).cwiseSqrt();
    for (int i = 0; i < 2 * j + 3; ++i) {
      const double want = i < j           ? spec.q_std
                          : i < 2 * j     ? spec.qdot_std
                          : i == 2 * j    ? spec.angvel_std
                                          : spec.gravity_std;
      worst_dev = std::max(worst_dev, std::abs(sd(i) / want - 1.0));
    }
  }

  const std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  auto cvae_policy = student::load_policy(biped(), runs.student(1, false));
  auto cfg = student_config(1, false);
  cfg.spec.arch = student::StudentArch::kMlp;
  const auto t0 = Clock::now();
  const auto mlp_ck =
      student::train_student(biped(), five_clips(), runs.teacher(), cfg)
          .checkpoint;
  std::printf("  trained DAgger MLP student (%.0f s)\n", seconds_since(t0));
  auto mlp_policy = student::load_policy(biped(), mlp_ck);
  const auto table = eval::robustness_sweep(
      biped(), {{"CVAE Student", cvae_policy.get()},
                {"DAgger without CVAE", mlp_policy.get()}},
      {0, 1, 2}, five_clips(), seeds);
  write_text_file(runs.out() / "robustness.txt", eval::format_robustness(table));
  write_text_file(runs.out() / "robustness.jsonl",
                  eval::robustness_to_jsonl(table));
  bool monotone = true;
  std::string srs;
  for (int p = 0; p < 2; ++p) {
    double prev = INFINITY;
    srs += p ? "; " : "";
    srs += table.rows[p].policy_id + " SR";
    for (int level = 0; level < 3; ++level) {
      const double sr = table.rows[level * 2 + p].summary().sr;
      srs += fmt(" %.0f", sr);
      monotone = monotone && sr <= prev;
      prev = sr;
    }
  }
  Verdict v;
  v.pass = worst_dev < 0.05 && monotone;
  v.detail = fmt("noise std worst deviation %.2f%% (< 5%%); levels 0/1/2 over "
                 "5 seeds: %s (non-increasing)",
                 100 * worst_dev, srs.c_str());
  return v;
}

// ----------------------------------------------------------------- criterion 8

Verdict criterion_8(Runs& runs) {
  const std::string text = R"({
    "seed": 3,
    "clips": [{"name": "stand", "kind": "squat", "amplitude": 0, "duration": 1.0},
              {"name": "walk", "kind": "walk", "amplitude": 0.6, "period": 1.6,
               "duration": 1.0}],
    "held_out": [{"name": "kick", "kind": "kick", "amplitude": 0.5, "duration": 1.0}],
    "retarget": {"scales": [1.1, 0.9, 1.0, 1.2]},
    "teacher": {"iterations": 3, "n_envs": 4, "horizon": 16, "hidden": [32],
                "eval_every": 1, "checkpoint_every": 2},
    "student": {"iterations": 3, "n_envs": 4, "horizon": 16, "eval_every": 1,
                "spec": {"history": 4, "window": 3, "latent_dim": 8,
                         "hidden": [32]}},
    "eval": {"seeds": [0, 1], "noise_level": 1},
    "ablation": {"kl_coef": [0.1, 0.01], "window": [3], "latent_dim": [8],
                 "explicit_ref": [false], "kl_residual": [true],
                 "latent_mode": ["deterministic"], "eval_seeds": [0],
                 "scratch": {"iterations": 2, "n_envs": 4, "horizon": 16,
                             "hidden": [32]}},
    "robustness": {"seeds": [0, 1], "policies": ["teacher", "student",
                                                 "dagger_mlp"]}
  })";
  const auto base = app::run_config_from_json(nlohmann::json::parse(text));
  std::vector<app::Stage> stages = app::all_stages();
  std::vector<app::PipelineResult> results;
  std::vector<fs::path> dirs;
  for (int run = 0; run < 2; ++run) {
    auto c = base;
    c.out_dir = runs.out() / ("determinism_" + std::to_string(run));
    fs::remove_all(c.out_dir);
    // The worker count must not matter either.
    c.jobs = c.teacher.jobs = c.student.jobs = c.ablation.scratch.jobs =
        run + 1;
    c.ablation.base.jobs = run + 1;
    results.push_back(app::run_pipeline(c, stages));
    dirs.push_back(c.out_dir);
  }
  int compared = 0, differing = 0;
  std::string first_diff;
  std::set<std::string> stage_names;
  for (const auto& a : results[0].artifacts) {
    ++compared;
    stage_names.insert(a.stage);
    const bool same = fs::exists(dirs[1] / a.path) &&
                      read_text_file(dirs[0] / a.path) ==
                          read_text_file(dirs[1] / a.path);
    if (!same) {
      ++differing;
      if (first_diff.empty()) first_diff = a.path;
    }
  }
  const bool manifests_equal =
      results[0].manifest.dump() == results[1].manifest.dump();
  Verdict v;
  v.pass = differing == 0 && manifests_equal &&
           results[0].artifacts.size() == results[1].artifacts.size() &&
           stage_names.size() == stages.size();
  v.detail = fmt("%d artifacts from %zu stages compared byte for byte "
                 "(jobs 1 vs 2): %d differ%s%s; manifests %s",
                 compared, stage_names.size(), differing,
                 first_diff.empty() ? "" : ", first ", first_diff.c_str(),
                 manifests_equal ? "equal" : "differ");
  return v;
}

// ----------------------------------------------------------------- criterion 9

Verdict criterion_9(Runs& runs) {
  eval::AblationGrid grid;
  grid.base = student_config(1, false, 20);
  grid.seeds = {1};
  grid.scratch = five_clip_teacher_config();
  grid.scratch.iterations = 20;
  eval::AblationOptions opt;
  opt.on_cell = [](const eval::AblationRow& r) {
    std::printf("  %s / %s%s\n", r.section.c_str(), r.method.c_str(),
                r.ok ? "" : " (failed)");
    std::fflush(stdout);
  };
  const auto table = eval::run_ablation(biped(), five_clips(), five_clips(),
                                        runs.teacher(), grid, opt);
  const std::string text = eval::format_ablation(table);
  write_text_file(runs.out() / "ablation.txt", text);
  write_text_file(runs.out() / "ablation.jsonl", eval::ablation_to_jsonl(table));
  std::printf("%s", text.c_str());

  // Structure: sections in order with their row counts, metric columns.
  const std::vector<std::pair<std::string, int>> want = {
      {"(a) Compare with Baselines", 3},
      {"(b) Ablation with Architecture Design", 2},
      {"(c) Ablation with KL Residual", 2},
      {"(d) Ablation with KL Coefficient", 4},
      {"(e) Ablation with Future Window Size", 4},
      {"(f) Ablation with Latent Dimension", 4},
      {"(g) Analysis of CVAE diversity", 2}};
  std::vector<std::pair<std::string, int>> got;
  bool all_ok = true;
  for (const auto& r : table.rows) {
    if (got.empty() || got.back().first != r.section) got.push_back({r.section, 0});
    ++got.back().second;
    all_ok = all_ok && r.ok && !r.rows.empty();
  }
  bool columns = true;
  for (const char* c : {"Method", "All", "Successful", "SR", "MPKPE",
                        "Vel-Dist", "Acc-Dist"})
    columns = columns && text.find(c) != std::string::npos;
  const auto back = eval::ablation_from_jsonl(eval::ablation_to_jsonl(table));
  const bool round_trip = back.rows.size() == table.rows.size() &&
                          eval::format_ablation(back) == text;

  // Single cell equals a direct call.
  const auto single = eval::run_ablation(
      biped(), five_clips(), five_clips(), runs.teacher(),
      eval::AblationGrid::single_cell(grid.base));
  const auto direct_ck =
      student::train_student(biped(), five_clips(), runs.teacher(), grid.base)
          .checkpoint;
  const auto direct = evaluate(direct_ck, five_clips());
  bool same = single.rows.size() == 1 &&
              single.rows[0].rows.size() == direct.rows.size();
  for (std::size_t i = 0; same && i < direct.rows.size(); ++i) {
    const auto& a = single.rows[0].rows[i];
    const auto& b = direct.rows[i];
    same = a.clip == b.clip && a.success == b.success && a.mpkpe == b.mpkpe &&
           a.vel_dist == b.vel_dist && a.acc_dist == b.acc_dist &&
           a.frames == b.frames;
  }
  Verdict v;
  v.pass = got == want && all_ok && columns && round_trip && same;
  v.detail = fmt("%zu sections, %zu cells (%s), metric columns %s, JSONL "
                 "round trip %s, single cell %s direct evaluation",
                 got.size(), table.rows.size(),
                 all_ok ? "all evaluated" : "some failed",
                 columns ? "present" : "missing", round_trip ? "exact" : "lossy",
                 same ? "equals" : "differs from");
  return v;
}

}  // namespace
}  // namespace wbt

int main(int argc, char** argv) {
  using namespace wbt;
  bool strict = false;
  fs::path out = fs::temp_directory_path() / "wbtrack_acceptance";
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--strict") {
      strict = true;
    } else if (a == "--out" && i + 1 < argc) {
      out = argv[++i];
    } else {
      const int n = std::atoi(a.c_str());
      if (n < 1 || n > 9) {
        std::fprintf(stderr, "usage: %s [--strict] [--out DIR] [1-9 ...]\n",
                     argv[0]);
        return 2;
      }
      selected.insert(n);
    }
  }
  if (selected.empty())
    for (int n = 1; n <= 9; ++n) selected.insert(n);
  fs::create_directories(out);

  Runs runs(out);
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"numerical core", [] { return criterion_1(); }},
      {"simulator physics", [] { return criterion_2(); }},
      {"retargeting round trip", [] { return criterion_3(); }},
      {"teacher sanity", [&] { return criterion_4(runs); }},
      {"distillation fidelity", [&] { return criterion_5(runs); }},
      {"architecture claim (held out)", [&] { return criterion_6(runs); }},
      {"robustness harness", [&] { return criterion_7(runs); }},
      {"determinism", [&] { return criterion_8(runs); }},
      {"ablation machinery", [&] { return criterion_9(runs); }},
  };
  std::vector<std::string> lines;
  int passed = 0, errors = 0;
  for (int n : selected) {
    const auto& [name, run] = criteria[n - 1];
    std::printf("-- criterion %d: %s\n", n, name);
    std::fflush(stdout);
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
      ++errors;
    }
    passed += v.pass ? 1 : 0;
    const std::string line =
        fmt("[%s] %d %s: ", v.pass ? "PASS" : "FAIL", n, name) + v.detail +
        fmt(" (%.0f s)", seconds_since(t0));
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    lines.push_back(line);
  }
  std::printf("\n==== acceptance summary ====\n");
  for (const auto& l : lines) std::printf("%s\n", l.c_str());
  std::printf("%d/%zu criteria pass\n", passed, selected.size());
  if (errors > 0) return 1;
  if (strict && passed != static_cast<int>(selected.size())) return 3;
  return 0;
}
