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

#include "wbt/app/pipeline.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "wbt/eval/ablation.hpp"
#include "wbt/eval/robustness.hpp"
#include "wbt/json_util.hpp"
#include "wbt/motion/retarget.hpp"
#include "wbt/teacher/env.hpp"

namespace wbt::app {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Stage s) {
  switch (s) {
    case Stage::kGenerate: return "generate";
    case Stage::kCurate: return "curate";
    case Stage::kRetarget: return "retarget";
    case Stage::kTrainTeacher: return "train-teacher";
    case Stage::kDistill: return "distill";
    case Stage::kEval: return "eval";
    case Stage::kAblate: return "ablate";
    case Stage::kRobustness: return "robustness";
  }
  return "?";
}

std::vector<Stage> all_stages() {
  return {Stage::kGenerate,     Stage::kCurate,  Stage::kRetarget,
          Stage::kTrainTeacher, Stage::kDistill, Stage::kEval,
          Stage::kAblate,       Stage::kRobustness};
}

Stage stage_from_string(const std::string& s) {
  for (Stage st : all_stages())
    if (s == to_string(st)) return st;
  throw ConfigError("unknown stage '" + s + "'");
}

void save_clip_set(const std::vector<motion::MotionClip>& clips,
                   const fs::path& dir) {
  fs::create_directories(dir);
  json index = json::array();
  for (const auto& c : clips) {
    const std::string file = c.name + ".jsonl";
    motion::save_clip(c, dir / file);
    index.push_back(file);
  }
  write_text_file(dir / "index.json", json{{"clips", index}}.dump(2) + "\n");
}

std::vector<motion::MotionClip> load_clip_set(const fs::path& dir) {
  const fs::path index_path = dir / "index.json";
  if (!fs::exists(index_path))
    throw DependencyError("missing clip set " + index_path.string());
  const json index =
      parse_json_config(read_text_file(index_path), index_path.string());
  std::vector<motion::MotionClip> clips;
  for (const auto& f : index.at("clips"))
    clips.push_back(motion::load_clip(dir / f.get<std::string>()));
  return clips;
}

namespace {

constexpr std::uint64_t kGenerateStream = 100;
constexpr std::uint64_t kHeldOutStream = 200;

class Runner {
 public:
  Runner(const RunConfig& c, std::ostream* progress)
      : c_(c),
        out_(c.out_dir),
        robot_(load_robot_or_default(c.robot)),
        robot_hash_(json_hash(sim::to_json_string(robot_))),
        cache_(c.cache_dir),
        log_(progress) {}

  PipelineResult run(const std::vector<Stage>& requested) {
    std::set<Stage> wanted(requested.begin(), requested.end());
    fs::create_directories(out_);
    load_manifest();
    std::vector<std::string> done;
    for (Stage s : all_stages()) {
      if (!wanted.count(s)) continue;
      say(std::string("[") + to_string(s) + "]");
      switch (s) {
        case Stage::kGenerate: generate(); break;
        case Stage::kCurate: curate(); break;
        case Stage::kRetarget: retarget(); break;
        case Stage::kTrainTeacher: train_teacher(); break;
        case Stage::kDistill: distill(); break;
        case Stage::kEval: evaluate(); break;
        case Stage::kAblate: ablate(); break;
        case Stage::kRobustness: robustness(); break;
      }
      done.push_back(to_string(s));
    }
    write_manifest(done);
    return std::move(res_);
  }

 private:
  void say(const std::string& line) {
    if (log_) *log_ << line << "\n";
  }

  void add(const std::string& rel, Stage stage, const std::string& hash,
           std::uint64_t seed) {
    std::erase_if(prior_, [&](const Artifact& a) { return a.path == rel; });
    std::erase_if(res_.artifacts,
                  [&](const Artifact& a) { return a.path == rel; });
    res_.artifacts.push_back({rel, to_string(stage), hash, seed});
  }

  fs::path need(const std::string& rel, Stage producer) const {
    const fs::path p = out_ / rel;
    if (!fs::exists(p))
      throw DependencyError("missing artifact " + p.string() +
                            " (produced by stage '" + to_string(producer) +
                            "')");
    return p;
  }

  std::vector<motion::MotionClip> clip_set(const std::string& dir,
                                           Stage producer) const {
    need(dir + "/index.json", producer);
    return load_clip_set(out_ / dir);
  }

  std::string train_dir() const {
    return c_.retarget.use_for_training ? "retargeted" : "curated";
  }
  Stage train_producer() const {
    return c_.retarget.use_for_training ? Stage::kRetarget : Stage::kCurate;
  }

  void add_clip_set(const std::string& dir,
                    const std::vector<motion::MotionClip>& clips, Stage stage,
                    const std::string& hash) {
    add(dir + "/index.json", stage, hash, c_.seed);
    for (const auto& clip : clips)
      add(dir + "/" + clip.name + ".jsonl", stage, hash, c_.seed);
  }

  std::vector<motion::MotionClip> make_clips(
      const std::vector<ClipRecipe>& recipes, std::uint64_t stream) const {
    std::vector<motion::MotionClip> clips;
    for (std::size_t i = 0; i < recipes.size(); ++i) {
      const auto& r = recipes[i];
      Rng rng(teacher::derive_seed(c_.seed, stream + i));
      auto clip = motion::generate_clip(r.kind, r.params, r.fps, r.duration,
                                        rng, robot_);
      clip.name = r.name;
      clips.push_back(std::move(clip));
    }
    return clips;
  }

  void generate() {
    json recipes = json::array(), held = json::array();
    for (const auto& r : c_.clips) recipes.push_back(to_json(r));
    for (const auto& r : c_.held_out) held.push_back(to_json(r));
    const auto clips = make_clips(c_.clips, kGenerateStream);
    const std::string hash =
        json_hash({"generate", c_.seed, robot_hash_, recipes});
    save_clip_set(clips, out_ / "clips");
    add_clip_set("clips", clips, Stage::kGenerate, hash);
    if (!c_.held_out.empty()) {
      const auto h = make_clips(c_.held_out, kHeldOutStream);
      const std::string hh =
          json_hash({"held_out", c_.seed, robot_hash_, held});
      save_clip_set(h, out_ / "held_out");
      add_clip_set("held_out", h, Stage::kGenerate, hh);
    }
    say("  " + std::to_string(clips.size()) + " clips");
  }

  void curate() {
    const auto clips = clip_set("clips", Stage::kGenerate);
    const auto result = motion::curate(clips, c_.curation);
    const std::string hash = json_hash(
        {"curate", eval::clips_hash(clips), c_.curation.min_frames,
         c_.curation.max_joint_vel, c_.curation.max_joint_acc,
         c_.curation.max_root_speed});
    save_clip_set(result.kept, out_ / "curated");
    write_text_file(out_ / "curated" / "rejections.jsonl",
                    motion::rejection_report(result.rejected));
    add_clip_set("curated", result.kept, Stage::kCurate, hash);
    add("curated/rejections.jsonl", Stage::kCurate, hash, c_.seed);
    say("  kept " + std::to_string(result.kept.size()) + ", rejected " +
        std::to_string(result.rejected.size()));
    if (result.kept.empty())
      throw InvalidInput("curation rejected every clip");
  }

  void retarget() {
    const auto clips = clip_set("curated", Stage::kCurate);
    const Vec scales = Eigen::Map<const Vec>(c_.retarget.scales.data(), 4);
    auto skel = motion::skeleton_from_robot(
        robot_, motion::biped_scale_groups(), 4);
    skel.correspondence = motion::default_correspondence();
    for (std::size_t i = 0; i < skel.rest_offsets.size(); ++i)
      skel.rest_offsets[i] *= scales(skel.scale_group[i]);
    const auto fit = motion::fit_shape(skel, robot_);
    std::vector<motion::MotionClip> out;
    for (const auto& clip : clips) {
      const auto source = motion::to_source_clip(clip, skel);
      auto r = motion::retarget_sequence(skel, fit.beta, source, robot_);
      r.clip.name = clip.name;
      out.push_back(std::move(r.clip));
    }
    const std::string hash = json_hash(
        {"retarget", eval::clips_hash(clips), c_.retarget.scales, robot_hash_});
    save_clip_set(out, out_ / "retargeted");
    json fit_j = {{"beta", std::vector<double>(fit.beta.data(),
                                               fit.beta.data() + 4)},
                  {"objective", fit.objective},
                  {"iterations", fit.iterations},
                  {"converged", fit.converged}};
    write_text_file(out_ / "retargeted" / "shape_fit.json",
                    fit_j.dump(2) + "\n");
    add_clip_set("retargeted", out, Stage::kRetarget, hash);
    add("retargeted/shape_fit.json", Stage::kRetarget, hash, c_.seed);
  }

  // Copies <name>.json and <name>_log.jsonl from the cache, or trains and
  // fills the cache.
  void train_cached(const std::string& name, const std::string& key,
                    Stage stage, std::uint64_t seed,
                    const std::function<long(const teacher::TrainIo&)>& train) {
    const fs::path ck = out_ / (name + ".json");
    const fs::path log = out_ / (name + "_log.jsonl");
    const fs::path cck = c_.cache_dir / (key + ".json");
    const fs::path clog = c_.cache_dir / (key + "_log.jsonl");
    if (cache_.enabled() && fs::exists(cck) && fs::exists(clog)) {
      fs::copy_file(cck, ck, fs::copy_options::overwrite_existing);
      fs::copy_file(clog, log, fs::copy_options::overwrite_existing);
      ++res_.cache_hits;
      say("  " + name + ": cache hit " + key);
    } else {
      teacher::TrainIo io;
      io.out_dir = out_;
      io.name = name;
      io.extra_meta = {{"config_hash", key}};
      res_.trained_env_steps += train(io);
      ++res_.trained_models;
      if (cache_.enabled()) {
        fs::create_directories(c_.cache_dir);
        fs::copy_file(ck, cck, fs::copy_options::overwrite_existing);
        fs::copy_file(log, clog, fs::copy_options::overwrite_existing);
      }
    }
    add(name + ".json", stage, key, seed);
    add(name + "_log.jsonl", stage, key, seed);
  }

  void train_teacher() {
    const auto clips = clip_set(train_dir(), train_producer());
    const std::string key =
        "teacher-" + json_hash({eval::config_hash(c_.teacher),
                                eval::clips_hash(clips), robot_hash_});
    train_cached("teacher", key, Stage::kTrainTeacher, c_.teacher.seed,
                 [&](const teacher::TrainIo& io) {
                   return teacher::train_teacher(robot_, clips, c_.teacher, io)
                       .env_steps;
                 });
  }

  nn::Checkpoint teacher_ckpt() const {
    return nn::load_checkpoint(need("teacher.json", Stage::kTrainTeacher));
  }

  nn::Checkpoint student_ckpt() const {
    return nn::load_checkpoint(need("student.json", Stage::kDistill));
  }

  void distill() {
    const auto teacher = teacher_ckpt();
    const auto clips = clip_set(train_dir(), train_producer());
    const std::string key =
        "student-" + json_hash({eval::config_hash(c_.student),
                                eval::checkpoint_hash(teacher),
                                eval::clips_hash(clips), robot_hash_});
    train_cached("student", key, Stage::kDistill, c_.student.seed,
                 [&](const teacher::TrainIo& io) {
                   return student::train_student(robot_, clips, teacher,
                                                 c_.student, io)
                       .env_steps;
                 });
  }

  void evaluate() {
    const auto teacher = teacher_ckpt();
    const auto stud = student_ckpt();
    std::vector<std::pair<std::string, std::vector<motion::MotionClip>>> sets;
    sets.emplace_back("train", clip_set(train_dir(), train_producer()));
    if (!c_.held_out.empty())
      sets.emplace_back("held_out", clip_set("held_out", Stage::kGenerate));
    const auto noise = eval::NoiseSpec::from_level(c_.eval.noise_level);
    const std::string base = json_hash(
        {"eval", eval::checkpoint_hash(teacher), eval::checkpoint_hash(stud),
         c_.eval.seeds, c_.eval.noise_level});
    fs::create_directories(out_ / "eval");
    std::string summary;
    for (const auto& [id, ck] :
         {std::pair{std::string("teacher"), teacher},
          std::pair{std::string("student"), stud}}) {
      auto policy = student::load_policy(robot_, ck);
      for (const auto& [set, clips] : sets) {
        auto report =
            eval::evaluate_suite(robot_, *policy, clips, noise, c_.eval.seeds);
        const std::string rel = "eval/" + id + "_" + set + ".jsonl";
        eval::save_report(report, out_ / rel);
        add(rel, Stage::kEval, base, c_.seed);
        const auto a = report.summary();
        char line[160];
        std::snprintf(line, sizeof line, "%-8s %-9s SR %6.2f  MPKPE %.4f m\n",
                      id.c_str(), set.c_str(), a.sr, a.mpkpe_all);
        summary += line;
      }
    }
    write_text_file(out_ / "eval" / "summary.txt", summary);
    add("eval/summary.txt", Stage::kEval, base, c_.seed);
    if (log_) *log_ << summary;
  }

  void ablate() {
    const auto teacher = teacher_ckpt();
    const auto clips = clip_set(train_dir(), train_producer());
    eval::AblationOptions opt;
    opt.cache = cache_;
    opt.on_cell = [&](const eval::AblationRow& r) {
      say("  " + r.section + " / " + r.method + (r.ok ? "" : ": failed"));
    };
    const auto table =
        eval::run_ablation(robot_, clips, clips, teacher, c_.ablation, opt);
    std::set<std::string> seen;
    for (const auto& r : table.rows) {
      if (!seen.insert(r.config_hash).second) continue;
      res_.cache_hits += r.cache_hits;
      if (r.ok)
        res_.trained_models +=
            static_cast<int>(c_.ablation.seeds.size()) - r.cache_hits;
    }
    const std::string hash =
        json_hash({"ablate", to_json(c_.ablation), eval::checkpoint_hash(teacher),
                   eval::clips_hash(clips)});
    fs::create_directories(out_ / "ablation");
    write_text_file(out_ / "ablation" / "ablation.jsonl",
                    eval::ablation_to_jsonl(table));
    write_text_file(out_ / "ablation" / "ablation.txt",
                    eval::format_ablation(table));
    add("ablation/ablation.jsonl", Stage::kAblate, hash, c_.seed);
    add("ablation/ablation.txt", Stage::kAblate, hash, c_.seed);
  }

  void robustness() {
    const auto teacher = teacher_ckpt();
    const auto clips = clip_set(train_dir(), train_producer());
    std::vector<std::unique_ptr<eval::Policy>> owned;
    std::vector<eval::NamedPolicy> policies;
    json hashes = json::array();
    for (const auto& id : c_.robustness.policies) {
      nn::Checkpoint ck;
      if (id == "teacher") {
        ck = teacher;
      } else if (id == "student") {
        ck = student_ckpt();
      } else {
        auto cfg = c_.student;
        cfg.spec.arch = student::StudentArch::kMlp;
        bool hit = false;
        ck = eval::distill_cached(robot_, clips, teacher, cfg, cache_, &hit);
        if (hit)
          ++res_.cache_hits;
        else
          ++res_.trained_models;
      }
      hashes.push_back(eval::checkpoint_hash(ck));
      owned.push_back(student::load_policy(robot_, ck));
      policies.push_back({id, owned.back().get()});
    }
    const auto table = eval::robustness_sweep(
        robot_, policies, c_.robustness.levels, clips, c_.robustness.seeds);
    const std::string hash =
        json_hash({"robustness", hashes, c_.robustness.levels,
                   c_.robustness.seeds, eval::clips_hash(clips)});
    fs::create_directories(out_ / "robustness");
    write_text_file(out_ / "robustness" / "robustness.jsonl",
                    eval::robustness_to_jsonl(table));
    const std::string text = eval::format_robustness(table);
    write_text_file(out_ / "robustness" / "robustness.txt", text);
    add("robustness/robustness.jsonl", Stage::kRobustness, hash, c_.seed);
    add("robustness/robustness.txt", Stage::kRobustness, hash, c_.seed);
    if (log_) *log_ << text;
  }

  // Artifacts recorded by earlier invocations stay listed unless this run
  // rewrites them.
  void load_manifest() {
    const fs::path p = out_ / "manifest.json";
    if (!fs::exists(p)) return;
    try {
      const json m = json::parse(read_text_file(p));
      if (m.value("config_hash", "") != config_hash(c_)) return;
      for (const auto& a : m.at("artifacts"))
        prior_.push_back({a.at("path"), a.at("stage"), a.at("config_hash"),
                          a.at("seed")});
    } catch (const json::exception&) {
      // A corrupt manifest is rebuilt from this run alone.
    }
  }

  void write_manifest(const std::vector<std::string>& stages) {
    std::vector<Artifact> all = prior_;
    all.insert(all.end(), res_.artifacts.begin(), res_.artifacts.end());
    json arts = json::array();
    for (const auto& a : all)
      arts.push_back({{"path", a.path},
                      {"stage", a.stage},
                      {"config_hash", a.config_hash},
                      {"seed", a.seed}});
    res_.manifest = {{"format", "wbtrack-manifest"},
                     {"format_version", 1},
                     {"config_hash", config_hash(c_)},
                     {"seed", c_.seed},
                     {"stages", stages},
                     {"artifacts", arts},
                     {"trained_models", res_.trained_models},
                     {"trained_env_steps", res_.trained_env_steps},
                     {"cache_hits", res_.cache_hits}};
    write_text_file(out_ / "run_config.json", to_json(c_).dump(2) + "\n");
    write_text_file(out_ / "manifest.json", res_.manifest.dump(2) + "\n");
  }

  const RunConfig& c_;
  fs::path out_;
  sim::RobotModel robot_;
  std::string robot_hash_;
  eval::CheckpointCache cache_;
  std::ostream* log_;
  PipelineResult res_;
  std::vector<Artifact> prior_;
};

}  // namespace

PipelineResult run_pipeline(const RunConfig& config,
                            const std::vector<Stage>& stages,
                            std::ostream* progress) {
  config.validate();
  return Runner(config, progress).run(stages);
}

}  // namespace wbt::app
