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

#include "wbt/app/run_config.hpp"

#include <set>

#include "wbt/json_util.hpp"
#include "wbt/teacher/env.hpp"

namespace wbt::app {

using nlohmann::json;

namespace {

// Stream ids for seeds derived from the run seed.
constexpr std::uint64_t kTeacherStream = 10;
constexpr std::uint64_t kStudentStream = 11;
constexpr std::uint64_t kScratchStream = 12;

std::vector<ClipRecipe> default_clips() {
  auto make = [](const char* name, motion::ClipKind kind, double amp,
                 double period) {
    ClipRecipe r;
    r.name = name;
    r.kind = kind;
    r.params.amplitude = amp;
    r.params.period = period;
    return r;
  };
  using motion::ClipKind;
  return {make("stand", ClipKind::kSquat, 0.0, 0.0),
          make("squat", ClipKind::kSquat, 1.0, 0.0),
          make("wave", ClipKind::kWave, 0.6, 0.0),
          make("walk_slow", ClipKind::kWalk, 0.6, 1.6),
          make("turn", ClipKind::kTurn, 1.0, 0.0)};
}

std::vector<ClipRecipe> recipes_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<ClipRecipe> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(
        clip_recipe_from_json(JsonReader(j[i], where + "[" + std::to_string(i) + "]")));
  return out;
}

json recipes_to_json(const std::vector<ClipRecipe>& rs) {
  json a = json::array();
  for (const auto& r : rs) a.push_back(to_json(r));
  return a;
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

json to_json(const ClipRecipe& r) {
  return {{"name", r.name},
          {"kind", motion::to_string(r.kind)},
          {"amplitude", r.params.amplitude},
          {"period", r.params.period},
          {"jitter", r.params.jitter},
          {"random_phase", r.params.random_phase},
          {"fps", r.fps},
          {"duration", r.duration}};
}

ClipRecipe clip_recipe_from_json(JsonReader r) {
  ClipRecipe c;
  std::string kind;
  r.require("kind", kind);
  try {
    c.kind = motion::clip_kind_from_string(kind);
  } catch (const InvalidInput& e) {
    throw ConfigError(r.where("kind") + ": " + e.what());
  }
  c.name = kind;
  r.get("name", c.name);
  r.get("amplitude", c.params.amplitude);
  r.get("period", c.params.period);
  r.get("jitter", c.params.jitter);
  r.get("random_phase", c.params.random_phase);
  r.get("fps", c.fps);
  r.get("duration", c.duration);
  r.finish();
  if (c.name.empty()) throw ConfigError(r.where("name") + ": empty");
  if (!(c.fps > 0.0) || !(c.duration > 0.0))
    throw ConfigError(r.where() + ": fps and duration must be > 0");
  return c;
}

json to_json(const eval::AblationGrid& g) {
  json modes = json::array();
  for (auto m : g.latent_mode) modes.push_back(student::to_string(m));
  json scratch = teacher::to_json(g.scratch);
  scratch.erase("jobs");
  return {{"baselines", g.baselines},
          {"explicit_ref", g.explicit_ref},
          {"kl_residual", g.kl_residual},
          {"kl_coef", g.kl_coef},
          {"window", g.window},
          {"latent_dim", g.latent_dim},
          {"latent_mode", modes},
          {"seeds", g.seeds},
          {"eval_seeds", g.eval_seeds},
          {"scratch", scratch}};
}

eval::AblationGrid ablation_grid_from_json(JsonReader r,
                                           eval::AblationGrid g) {
  r.get("baselines", g.baselines);
  r.get("explicit_ref", g.explicit_ref);
  r.get("kl_residual", g.kl_residual);
  r.get("kl_coef", g.kl_coef);
  r.get("window", g.window);
  r.get("latent_dim", g.latent_dim);
  if (r.has("latent_mode")) {
    std::vector<std::string> modes;
    r.get("latent_mode", modes);
    g.latent_mode.clear();
    try {
      for (const auto& m : modes)
        g.latent_mode.push_back(student::latent_mode_from_string(m));
    } catch (const Error& e) {
      throw ConfigError(r.where("latent_mode") + ": " + e.what());
    }
  }
  r.get("seeds", g.seeds);
  r.get("eval_seeds", g.eval_seeds);
  if (r.has("scratch")) {
    json s = json::object();
    r.get("scratch", s);
    if (!s.contains("seed")) s["seed"] = g.scratch.seed;
    g.scratch = teacher::teacher_config_from_json(s);
  }
  r.finish();
  if (g.seeds.empty() || g.eval_seeds.empty())
    throw ConfigError(r.where() + ": seeds and eval_seeds must be non-empty");
  return g;
}

void RunConfig::validate() const {
  if (jobs < 1) throw ConfigError("config.jobs: must be >= 1");
  if (clips.empty()) throw ConfigError("config.clips: at least one clip");
  std::set<std::string> names;
  for (const auto& c : clips)
    if (!names.insert(c.name).second)
      throw ConfigError("config.clips: duplicate name '" + c.name + "'");
  for (const auto& c : held_out)
    if (!names.insert(c.name).second)
      throw ConfigError("config.held_out: duplicate name '" + c.name + "'");
  curation.validate();
  if (retarget.scales.size() != 4)
    throw ConfigError("config.retarget.scales: expected 4 limb-group scales");
  for (double s : retarget.scales)
    if (!(s > 0.0)) throw ConfigError("config.retarget.scales: must be > 0");
  teacher.validate();
  student.validate();
  ablation.scratch.validate();
  if (eval.seeds.empty()) throw ConfigError("config.eval.seeds: empty");
  if (eval.noise_level < 0 || eval.noise_level > 2)
    throw ConfigError("config.eval.noise_level: must be 0, 1 or 2");
  if (robustness.seeds.empty() || robustness.levels.empty())
    throw ConfigError("config.robustness: levels and seeds must be non-empty");
  for (std::size_t i = 0; i < robustness.levels.size(); ++i)
    if (robustness.levels[i] < 0 || robustness.levels[i] > 2 ||
        (i > 0 && robustness.levels[i] <= robustness.levels[i - 1]))
      throw ConfigError(
          "config.robustness.levels: strictly increasing values in [0, 2]");
  for (const auto& p : robustness.policies)
    if (p != "teacher" && p != "student" && p != "dagger_mlp")
      throw ConfigError("config.robustness.policies: unknown policy '" + p +
                        "'");
}

RunConfig run_config_from_json(const json& j,
                               const std::filesystem::path& base_dir) {
  JsonReader r(j, "config");
  RunConfig c;
  r.require("seed", c.seed);
  std::string robot, out_dir, cache_dir;
  r.get("robot", robot);
  r.get("out_dir", out_dir);
  r.get("cache_dir", cache_dir);
  r.get("jobs", c.jobs);
  c.robot = resolve(base_dir, robot);
  if (!out_dir.empty()) c.out_dir = resolve(base_dir, out_dir);
  c.cache_dir = resolve(base_dir, cache_dir);
  if (!c.robot.empty() && !std::filesystem::exists(c.robot))
    throw ConfigError("config.robot: no such file " + c.robot.string());

  c.clips = r.has("clips") ? recipes_from_json(j.at("clips"), "config.clips")
                           : default_clips();
  if (r.has("held_out"))
    c.held_out = recipes_from_json(j.at("held_out"), "config.held_out");
  json ignored;
  r.get("clips", ignored);
  r.get("held_out", ignored);

  {
    auto cr = r.child("curation");
    cr.get("min_frames", c.curation.min_frames);
    cr.get("max_joint_vel", c.curation.max_joint_vel);
    cr.get("max_joint_acc", c.curation.max_joint_acc);
    cr.get("max_root_speed", c.curation.max_root_speed);
    cr.finish();
  }
  {
    auto rr = r.child("retarget");
    rr.get("scales", c.retarget.scales);
    rr.get("use_for_training", c.retarget.use_for_training);
    rr.finish();
  }
  {
    json t = j.value("teacher", json::object());
    if (!t.contains("seed"))
      t["seed"] = teacher::derive_seed(c.seed, kTeacherStream);
    t.erase("jobs");
    t["jobs"] = c.jobs;
    c.teacher = teacher::teacher_config_from_json(t);
    r.get("teacher", ignored);
  }
  {
    json s = j.value("student", json::object());
    if (!s.contains("seed"))
      s["seed"] = teacher::derive_seed(c.seed, kStudentStream);
    s["jobs"] = c.jobs;
    c.student = student::student_config_from_json(s);
    r.get("student", ignored);
  }
  {
    auto er = r.child("eval");
    er.get("seeds", c.eval.seeds);
    er.get("noise_level", c.eval.noise_level);
    er.finish();
  }
  {
    eval::AblationGrid base;
    base.base = c.student;
    base.scratch = c.teacher;
    base.scratch.seed = teacher::derive_seed(c.seed, kScratchStream);
    base.seeds = {c.student.seed};
    c.ablation = ablation_grid_from_json(r.child("ablation"), base);
    c.ablation.scratch.jobs = c.jobs;
  }
  {
    auto rr = r.child("robustness");
    rr.get("levels", c.robustness.levels);
    rr.get("seeds", c.robustness.seeds);
    rr.get("policies", c.robustness.policies);
    rr.finish();
  }
  r.finish();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const json j = parse_json_config(read_text_file(path), path.string());
  return run_config_from_json(j, path.parent_path());
}

json to_json(const RunConfig& c) {
  json clips = recipes_to_json(c.clips);
  json held = recipes_to_json(c.held_out);
  json grid = to_json(c.ablation);
  return {{"seed", c.seed},
          {"robot", c.robot.string()},
          {"out_dir", c.out_dir.string()},
          {"cache_dir", c.cache_dir.string()},
          {"jobs", c.jobs},
          {"clips", clips},
          {"held_out", held},
          {"curation",
           {{"min_frames", c.curation.min_frames},
            {"max_joint_vel", c.curation.max_joint_vel},
            {"max_joint_acc", c.curation.max_joint_acc},
            {"max_root_speed", c.curation.max_root_speed}}},
          {"retarget",
           {{"scales", c.retarget.scales},
            {"use_for_training", c.retarget.use_for_training}}},
          {"teacher", teacher::to_json(c.teacher)},
          {"student", student::to_json(c.student)},
          {"eval",
           {{"seeds", c.eval.seeds}, {"noise_level", c.eval.noise_level}}},
          {"ablation", grid},
          {"robustness",
           {{"levels", c.robustness.levels},
            {"seeds", c.robustness.seeds},
            {"policies", c.robustness.policies}}}};
}

std::string config_hash(const RunConfig& c) {
  json j = to_json(c);
  for (const char* k : {"out_dir", "cache_dir", "jobs"}) j.erase(k);
  j["teacher"].erase("jobs");
  j["student"].erase("jobs");
  // The robot enters through its content, not its path.
  j["robot"] = sim::to_json_string(load_robot_or_default(c.robot));
  return json_hash(j);
}

sim::RobotModel load_robot_or_default(const std::filesystem::path& path) {
  if (path.empty()) return sim::default_biped();
  return sim::load_robot(path);
}

}  // namespace wbt::app
