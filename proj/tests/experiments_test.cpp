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

#include <filesystem>
#include <set>

#include <gtest/gtest.h>

#include "wbt/eval/ablation.hpp"
#include "wbt/eval/robustness.hpp"
#include "wbt/motion/generate.hpp"
#include "wbt/teacher/obs.hpp"

namespace wbt::eval {
namespace {

const sim::RobotModel& biped() {
  static const sim::RobotModel m = sim::default_biped();
  return m;
}

motion::MotionClip make_clip(motion::ClipKind kind, double amp) {
  Rng rng(3);
  motion::GeneratorParams p;
  p.amplitude = amp;
  auto c = motion::generate_clip(kind, p, 50.0, 0.6, rng, biped());
  c.name = motion::to_string(kind) + std::to_string(static_cast<int>(amp * 10));
  return c;
}

class Experiments : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    clips_ = {make_clip(motion::ClipKind::kSquat, 0.0),
              make_clip(motion::ClipKind::kSquat, 1.0)};
    teacher::TeacherConfig tc;
    tc.seed = 1;
    tc.iterations = 1;
    tc.n_envs = 4;
    tc.horizon = 8;
    tc.hidden = {16};
    teacher_ = teacher::train_teacher(biped(), clips_, tc).checkpoint;
  }
  static student::StudentConfig config() {
    student::StudentConfig c;
    c.seed = 3;
    c.iterations = 2;
    c.n_envs = 4;
    c.horizon = 6;
    c.spec.history = 3;
    c.spec.window = 2;
    c.spec.latent_dim = 4;
    c.spec.hidden = {16};
    return c;
  }
  static AblationGrid small_grid() {
    AblationGrid g = AblationGrid::single_cell(config());
    g.kl_coef = {1.0, 0.1, 0.01, 0.001};
    return g;
  }
  static std::vector<motion::MotionClip> clips_;
  static nn::Checkpoint teacher_;
};

std::vector<motion::MotionClip> Experiments::clips_;
nn::Checkpoint Experiments::teacher_;

void expect_rows_equal(const std::vector<TrackingRow>& a,
                       const std::vector<TrackingRow>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].clip, b[i].clip);
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].success, b[i].success);
    EXPECT_EQ(a[i].mpkpe, b[i].mpkpe);
    EXPECT_EQ(a[i].vel_dist, b[i].vel_dist);
    EXPECT_EQ(a[i].acc_dist, b[i].acc_dist);
    EXPECT_EQ(a[i].termination, b[i].termination);
    EXPECT_EQ(a[i].frames, b[i].frames);
  }
}

TEST(Grid, FullGridHasSevenSectionsAndTwentyOneCells) {
  const auto cells = expand_grid(AblationGrid{});
  EXPECT_EQ(cells.size(), 21u);
  std::set<std::string> sections;
  for (const auto& c : cells) sections.insert(c.section);
  EXPECT_EQ(sections.size(), 7u);
  EXPECT_EQ(cells[0].method, "DAgger without CVAE");
  EXPECT_EQ(cells[0].student.spec.arch, student::StudentArch::kMlp);
  EXPECT_EQ(cells[1].kind, CellKind::kScratch);
  EXPECT_EQ(cells[2].method, "CVAE Student");
}

TEST(Grid, EachCellDiffersFromBaseOnlyOnItsAxis) {
  AblationGrid g;
  g.baselines = false;
  for (const auto& c : expand_grid(g)) {
    auto s = c.student;
    auto b = g.base;
    // Reset the varied axis, then compare the rest.
    s.beta = b.beta;
    s.spec.explicit_ref = b.spec.explicit_ref;
    s.spec.kl_residual = b.spec.kl_residual;
    s.spec.window = b.spec.window;
    s.spec.latent_dim = b.spec.latent_dim;
    s.spec.latent_mode = b.spec.latent_mode;
    EXPECT_EQ(config_hash(s), config_hash(b)) << c.method;
  }
}

TEST(Grid, KlCoefficientLabels) {
  AblationGrid g = AblationGrid::single_cell(student::StudentConfig{});
  g.kl_coef = {1.0, 0.1, 0.01, 0.001};
  const auto cells = expand_grid(g);
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[0].method, "KL Coef = 1.0");
  EXPECT_EQ(cells[3].method, "KL Coef = 0.001");
  EXPECT_EQ(cells[2].student.beta, 0.01);
}

TEST(Grid, ConfigHashIgnoresJobs) {
  student::StudentConfig a, b;
  b.jobs = 4;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.beta = 0.5;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST_F(Experiments, SingleCellMatchesDirectEvaluation) {
  const auto c = config();
  const auto table = run_ablation(biped(), clips_, clips_, teacher_,
                                  AblationGrid::single_cell(c));
  ASSERT_EQ(table.rows.size(), 1u);
  ASSERT_TRUE(table.rows[0].ok) << table.rows[0].error;
  const auto ck = student::train_student(biped(), clips_, teacher_, c);
  auto policy = student::load_policy(biped(), ck.checkpoint);
  const auto direct =
      evaluate_suite(biped(), *policy, clips_, NoiseSpec{}, {0});
  expect_rows_equal(table.rows[0].rows, direct.rows);
}

TEST_F(Experiments, KlAxisGivesFourDeterministicRows) {
  const auto a = run_ablation(biped(), clips_, clips_, teacher_, small_grid());
  const auto b = run_ablation(biped(), clips_, clips_, teacher_, small_grid());
  ASSERT_EQ(a.rows.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_TRUE(a.rows[i].ok);
    EXPECT_EQ(a.rows[i].config_hash, b.rows[i].config_hash);
    expect_rows_equal(a.rows[i].rows, b.rows[i].rows);
  }
  EXPECT_NE(a.rows[0].config_hash, a.rows[1].config_hash);
}

TEST_F(Experiments, FailingCellIsRecordedAndGridContinues) {
  AblationGrid g = small_grid();
  g.kl_coef = {0.1};
  g.window = {2};
  g.base.fault_iteration = 1;
  const auto bad = run_ablation(biped(), clips_, clips_, teacher_, g);
  ASSERT_EQ(bad.rows.size(), 2u);
  EXPECT_FALSE(bad.rows[0].ok);
  EXPECT_NE(bad.rows[0].error.find("iteration"), std::string::npos)
      << bad.rows[0].error;
  EXPECT_TRUE(bad.rows[0].rows.empty());
  EXPECT_EQ(bad.rows[1].section, "(e) Ablation with Future Window Size");
  EXPECT_FALSE(bad.rows[1].ok);
  EXPECT_NE(format_ablation(bad).find("failed:"), std::string::npos);
}

TEST_F(Experiments, CacheMakesTheSecondRunTrainNothing) {
  const auto dir =
      std::filesystem::temp_directory_path() / "wbt_experiments_cache";
  std::filesystem::remove_all(dir);
  AblationOptions opt;
  opt.cache = CheckpointCache(dir);
  AblationGrid g = small_grid();
  g.kl_coef = {0.1, 0.01};
  const auto first = run_ablation(biped(), clips_, clips_, teacher_, g, opt);
  const auto second = run_ablation(biped(), clips_, clips_, teacher_, g, opt);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(first.rows[i].cache_hits, 0);
    EXPECT_EQ(second.rows[i].cache_hits, 1);
    expect_rows_equal(first.rows[i].rows, second.rows[i].rows);
  }
  std::filesystem::remove_all(dir);
}

TEST_F(Experiments, ScratchBaselineTrainsOnDeployObservations) {
  AblationGrid g = AblationGrid::single_cell(config());
  g.kl_coef.clear();
  g.baselines = true;
  g.scratch.seed = 1;
  g.scratch.iterations = 1;
  g.scratch.n_envs = 4;
  g.scratch.horizon = 8;
  g.scratch.hidden = {16};
  const auto t = run_ablation(biped(), clips_, clips_, teacher_, g);
  ASSERT_EQ(t.rows.size(), 3u);
  for (const auto& r : t.rows) EXPECT_TRUE(r.ok) << r.method << r.error;
  const auto ck = scratch_cached(biped(), clips_, g.scratch, config().spec,
                                 CheckpointCache{});
  EXPECT_EQ(ck.meta.at("obs").at("type"), "deploy");
}

TEST_F(Experiments, AblationJsonlRoundTrips) {
  AblationGrid g = small_grid();
  g.kl_coef = {0.1};
  g.window = {2};
  g.latent_dim = {2};
  auto t = run_ablation(biped(), clips_, clips_, teacher_, g);
  t.rows[1].ok = false;
  t.rows[1].error = "synthetic";
  t.rows[1].rows.clear();
  const auto back = ablation_from_jsonl(ablation_to_jsonl(t));
  ASSERT_EQ(back.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].section, t.rows[i].section);
    EXPECT_EQ(back.rows[i].method, t.rows[i].method);
    EXPECT_EQ(back.rows[i].ok, t.rows[i].ok);
    EXPECT_EQ(back.rows[i].error, t.rows[i].error);
    expect_rows_equal(back.rows[i].rows, t.rows[i].rows);
  }
  EXPECT_THROW(ablation_from_jsonl(""), InvalidInput);
  EXPECT_THROW(ablation_from_jsonl("{\"format\":\"other\"}\n"), InvalidInput);
}

TEST(AblationFormat, HasOneBlockPerSection) {
  AblationTable t;
  for (const auto& c : expand_grid(AblationGrid{})) {
    AblationRow r;
    r.section = c.section;
    r.method = c.method;
    r.ok = true;
    TrackingRow row;
    row.clip = "x";
    row.success = true;
    row.mpkpe = 0.05;
    r.rows = {row};
    t.rows.push_back(r);
  }
  const auto text = format_ablation(t);
  for (char s = 'a'; s <= 'g'; ++s)
    EXPECT_NE(text.find(std::string("(") + s + ")"), std::string::npos);
  EXPECT_NE(text.find("KL Coef = 0.001"), std::string::npos);
}

TEST_F(Experiments, RobustnessLevelZeroMatchesEvaluateSuite) {
  auto teacher = student::load_policy(biped(), teacher_);
  const auto ck =
      student::train_student(biped(), clips_, teacher_, config()).checkpoint;
  auto stud = student::load_policy(biped(), ck);
  const auto t = robustness_sweep(
      biped(), {{"teacher", teacher.get()}, {"student", stud.get()}}, {0, 1, 2},
      clips_, {0, 1});
  ASSERT_EQ(t.rows.size(), 6u);
  EXPECT_EQ(t.rows[0].policy_id, "teacher");
  EXPECT_EQ(t.rows[3].level, 1);
  const auto direct =
      evaluate_suite(biped(), *stud, clips_, NoiseSpec{}, {0, 1});
  expect_rows_equal(t.rows[1].rows, direct.rows);
  const auto back = robustness_from_jsonl(robustness_to_jsonl(t));
  ASSERT_EQ(back.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].policy_id, t.rows[i].policy_id);
    EXPECT_EQ(back.rows[i].level, t.rows[i].level);
    expect_rows_equal(back.rows[i].rows, t.rows[i].rows);
  }
  const auto text = format_robustness(t);
  EXPECT_NE(text.find("(c) Noise Level 2"), std::string::npos);
}

TEST_F(Experiments, RobustnessRejectsBadLevels) {
  auto p = student::load_policy(biped(), teacher_);
  EXPECT_THROW(robustness_sweep(biped(), {{"t", p.get()}}, {0, 0}, clips_, {0}),
               InvalidInput);
  EXPECT_THROW(robustness_sweep(biped(), {{"t", p.get()}}, {1, 0}, clips_, {0}),
               InvalidInput);
  EXPECT_THROW(robustness_sweep(biped(), {{"t", p.get()}}, {}, clips_, {0}),
               InvalidInput);
  EXPECT_THROW(robustness_sweep(biped(), {{"t", nullptr}}, {0}, clips_, {0}),
               InvalidInput);
}

}  // namespace
}  // namespace wbt::eval
