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

#include "wbt/app/cli.hpp"

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "wbt/app/pipeline.hpp"
#include "wbt/app/plot_data.hpp"
#include "wbt/app/run_config.hpp"
#include "wbt/eval/ablation.hpp"
#include "wbt/eval/robustness.hpp"
#include "wbt/json_util.hpp"
#include "wbt/motion/retarget.hpp"

namespace wbt::app {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const DependencyError*>(&e)) return kExitDependency;
  if (dynamic_cast<const NumericalDivergence*>(&e)) return kExitDivergence;
  return kExitError;
}

namespace {

struct Globals {
  std::string robot;
  std::string cache_dir;
  int jobs = 1;
};

std::vector<motion::MotionClip> load_clips(const std::vector<std::string>& paths) {
  std::vector<motion::MotionClip> clips;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      auto set = load_clip_set(p);
      clips.insert(clips.end(), set.begin(), set.end());
    } else if (fs::exists(p)) {
      clips.push_back(motion::load_clip(p));
    } else {
      throw DependencyError("missing clip input " + p);
    }
  }
  if (clips.empty()) throw ConfigError("no clips given");
  return clips;
}

nn::Checkpoint load_ckpt(const std::string& path, const char* what) {
  if (!fs::exists(path))
    throw DependencyError(std::string("missing ") + what + " checkpoint " +
                          path);
  return nn::load_checkpoint(path);
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  if (!fs::exists(path)) throw ConfigError("no such config file " + path);
  return parse_json_config(read_text_file(path), path);
}

std::string cache_dir_of(const Globals& g) {
  if (!g.cache_dir.empty()) return g.cache_dir;
  const char* env = std::getenv("WBTRACK_CACHE_DIR");
  return env ? env : "";
}

void print_summary(std::ostream& out, const std::string& label,
                   const eval::Aggregate& a) {
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%-12s SR %6.2f  MPKPE %.4f m  Vel-Dist %.4f  Acc-Dist %.3f\n",
                label.c_str(), a.sr, a.mpkpe_all, a.vel_all, a.acc_all);
  out << buf;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Whole-body motion tracking: data, teacher, student, evaluation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--robot", g.robot, "Robot model JSON (default: built-in biped)");
  app.add_option("--cache-dir", g.cache_dir,
                 "Trained-model cache (default: $WBTRACK_CACHE_DIR)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::function<void()> action;

  // generate
  auto* gen = app.add_subcommand("generate", "Synthesize a reference clip");
  std::string kind, gen_out, gen_name;
  motion::GeneratorParams gp;
  double fps = 50.0, duration = 4.0;
  std::uint64_t gen_seed = 0;
  gen->add_option("--kind", kind, "walk, squat, wave, kick or turn")->required();
  gen->add_option("--amplitude", gp.amplitude);
  gen->add_option("--period", gp.period, "s; 0 for the default");
  gen->add_option("--jitter", gp.jitter);
  gen->add_flag("--random-phase", gp.random_phase);
  gen->add_option("--fps", fps);
  gen->add_option("--duration", duration, "s");
  gen->add_option("--name", gen_name);
  gen->add_option("--seed", gen_seed)->required();
  gen->add_option("--out", gen_out, "Clip file (.jsonl)")->required();
  gen->callback([&] {
    action = [&] {
      const auto robot = load_robot_or_default(g.robot);
      motion::ClipKind k;
      try {
        k = motion::clip_kind_from_string(kind);
      } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
      }
      Rng rng(gen_seed);
      auto clip = motion::generate_clip(k, gp, fps, duration, rng, robot);
      clip.name = gen_name.empty() ? kind : gen_name;
      motion::save_clip(clip, gen_out);
      out << "wrote " << gen_out << " (" << clip.size() << " frames)\n";
    };
  });

  // curate
  auto* cur = app.add_subcommand("curate", "Drop physically infeasible clips");
  std::vector<std::string> cur_in;
  std::string cur_out;
  motion::CurationPolicy cp;
  cur->add_option("--in", cur_in, "Clip files or clip-set directories")->required();
  cur->add_option("--out-dir", cur_out)->required();
  cur->add_option("--min-frames", cp.min_frames);
  cur->add_option("--max-joint-vel", cp.max_joint_vel, "rad/s");
  cur->add_option("--max-joint-acc", cp.max_joint_acc, "rad/s^2");
  cur->add_option("--max-root-speed", cp.max_root_speed, "m/s");
  cur->callback([&] {
    action = [&] {
      cp.validate();
      const auto r = motion::curate(load_clips(cur_in), cp);
      save_clip_set(r.kept, cur_out);
      write_text_file(fs::path(cur_out) / "rejections.jsonl",
                      motion::rejection_report(r.rejected));
      out << "kept " << r.kept.size() << ", rejected " << r.rejected.size()
          << "\n";
    };
  });

  // retarget
  auto* ret = app.add_subcommand(
      "retarget", "Fit a scaled source skeleton and retarget its motion");
  std::vector<std::string> ret_in;
  std::string ret_out;
  std::vector<double> scales = {1.0, 1.0, 1.0, 1.0};
  ret->add_option("--in", ret_in, "Robot clips replayed on the source skeleton")
      ->required();
  ret->add_option("--scales", scales, "Source limb-group scales (4 values)")
      ->expected(4);
  ret->add_option("--out-dir", ret_out)->required();
  ret->callback([&] {
    action = [&] {
      const auto robot = load_robot_or_default(g.robot);
      auto skel = motion::skeleton_from_robot(robot, motion::biped_scale_groups(), 4);
      skel.correspondence = motion::default_correspondence();
      for (std::size_t i = 0; i < skel.rest_offsets.size(); ++i)
        skel.rest_offsets[i] *= scales.at(skel.scale_group[i]);
      const auto fit = motion::fit_shape(skel, robot);
      out << "shape fit beta = " << fit.beta.transpose() << "\n";
      std::vector<motion::MotionClip> result;
      for (const auto& c : load_clips(ret_in)) {
        auto r = motion::retarget_sequence(
            skel, fit.beta, motion::to_source_clip(c, skel), robot);
        r.clip.name = c.name;
        out << c.name << ": " << r.iterations << " iterations\n";
        result.push_back(std::move(r.clip));
      }
      save_clip_set(result, ret_out);
    };
  });

  // train-teacher
  auto* tt = app.add_subcommand("train-teacher", "PPO oracle policy");
  std::vector<std::string> tt_clips;
  std::string tt_config, tt_out, tt_name = "teacher";
  std::uint64_t tt_seed = 0;
  tt->add_option("--clips", tt_clips)->required();
  tt->add_option("--config", tt_config, "Teacher config JSON");
  tt->add_option("--seed", tt_seed)->required();
  tt->add_option("--out-dir", tt_out)->required();
  tt->add_option("--name", tt_name);
  tt->callback([&] {
    action = [&] {
      json j = read_config(tt_config);
      j["seed"] = tt_seed;
      j["jobs"] = g.jobs;
      const auto cfg = teacher::teacher_config_from_json(j);
      const auto clips = load_clips(tt_clips);
      teacher::TrainIo io;
      io.out_dir = tt_out;
      io.name = tt_name;
      fs::create_directories(tt_out);
      const auto r = teacher::train_teacher(
          load_robot_or_default(g.robot), clips, cfg, io);
      out << "trained " << cfg.iterations << " iterations, " << r.env_steps
          << " env steps -> " << (fs::path(tt_out) / (tt_name + ".json"))
          << "\n";
    };
  });

  // distill
  auto* di = app.add_subcommand("distill", "DAgger distillation into a student");
  std::vector<std::string> di_clips;
  std::string di_config, di_teacher, di_out, di_name = "student";
  std::uint64_t di_seed = 0;
  di->add_option("--clips", di_clips)->required();
  di->add_option("--teacher", di_teacher, "Teacher checkpoint")->required();
  di->add_option("--config", di_config, "Student config JSON");
  di->add_option("--seed", di_seed)->required();
  di->add_option("--out-dir", di_out)->required();
  di->add_option("--name", di_name);
  di->callback([&] {
    action = [&] {
      json j = read_config(di_config);
      j["seed"] = di_seed;
      j["jobs"] = g.jobs;
      const auto cfg = student::student_config_from_json(j);
      const auto teacher = load_ckpt(di_teacher, "teacher");
      const auto clips = load_clips(di_clips);
      teacher::TrainIo io;
      io.out_dir = di_out;
      io.name = di_name;
      fs::create_directories(di_out);
      const auto r = student::train_student(load_robot_or_default(g.robot),
                                            clips, teacher, cfg, io);
      out << "distilled " << cfg.iterations << " iterations, " << r.env_steps
          << " env steps -> " << (fs::path(di_out) / (di_name + ".json"))
          << "\n";
    };
  });

  // eval
  auto* ev = app.add_subcommand("eval", "Track clips with a policy checkpoint");
  std::string ev_policy, ev_out;
  std::vector<std::string> ev_clips;
  std::vector<std::uint64_t> ev_seeds = {0};
  int ev_level = 0;
  ev->add_option("--policy", ev_policy, "Policy checkpoint")->required();
  ev->add_option("--clips", ev_clips)->required();
  ev->add_option("--seeds", ev_seeds);
  ev->add_option("--noise-level", ev_level)->check(CLI::Range(0, 2));
  ev->add_option("--out", ev_out, "Report (.jsonl)");
  ev->callback([&] {
    action = [&] {
      const auto robot = load_robot_or_default(g.robot);
      auto policy = student::load_policy(robot, load_ckpt(ev_policy, "policy"));
      const auto report =
          eval::evaluate_suite(robot, *policy, load_clips(ev_clips),
                               eval::NoiseSpec::from_level(ev_level), ev_seeds);
      for (const auto& r : report.rows) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-16s seed %-4llu %s MPKPE %.4f %s\n",
                      r.clip.c_str(), static_cast<unsigned long long>(r.seed),
                      r.success ? "ok  " : "FAIL", r.mpkpe,
                      r.termination.c_str());
        out << buf;
      }
      print_summary(out, report.policy_id, report.summary());
      if (!ev_out.empty()) eval::save_report(report, ev_out);
    };
  });

  // ablate
  auto* ab = app.add_subcommand("ablate", "Baseline and ablation grid");
  std::vector<std::string> ab_clips, ab_eval_clips;
  std::string ab_teacher, ab_config, ab_out;
  std::uint64_t ab_seed = 0;
  ab->add_option("--clips", ab_clips, "Training clips")->required();
  ab->add_option("--eval-clips", ab_eval_clips, "Default: the training clips");
  ab->add_option("--teacher", ab_teacher)->required();
  ab->add_option("--config", ab_config,
                 "Run config JSON; its student and ablation sections apply");
  ab->add_option("--seed", ab_seed)->required();
  ab->add_option("--out-dir", ab_out)->required();
  ab->callback([&] {
    action = [&] {
      json j = read_config(ab_config);
      j["seed"] = ab_seed;
      j["jobs"] = g.jobs;
      const auto cfg = run_config_from_json(j, fs::path(ab_config).parent_path());
      const auto robot = load_robot_or_default(g.robot);
      const auto train = load_clips(ab_clips);
      const auto evalc = ab_eval_clips.empty() ? train : load_clips(ab_eval_clips);
      eval::AblationOptions opt;
      opt.cache = eval::CheckpointCache(cache_dir_of(g));
      opt.on_cell = [&](const eval::AblationRow& r) {
        out << r.section << " / " << r.method << (r.ok ? "" : ": failed")
            << "\n";
      };
      const auto table = eval::run_ablation(
          robot, train, evalc, load_ckpt(ab_teacher, "teacher"), cfg.ablation, opt);
      fs::create_directories(ab_out);
      write_text_file(fs::path(ab_out) / "ablation.jsonl",
                      eval::ablation_to_jsonl(table));
      const auto text = eval::format_ablation(table);
      write_text_file(fs::path(ab_out) / "ablation.txt", text);
      out << text;
    };
  });

  // robustness
  auto* ro = app.add_subcommand("robustness", "Observation-noise sweep");
  std::vector<std::string> ro_policies, ro_clips;
  std::vector<int> ro_levels = {0, 1, 2};
  std::vector<std::uint64_t> ro_seeds = {0, 1, 2, 3, 4};
  std::string ro_out;
  ro->add_option("--policy", ro_policies, "id=checkpoint")->required();
  ro->add_option("--clips", ro_clips)->required();
  ro->add_option("--levels", ro_levels);
  ro->add_option("--seeds", ro_seeds);
  ro->add_option("--out-dir", ro_out);
  ro->callback([&] {
    action = [&] {
      const auto robot = load_robot_or_default(g.robot);
      std::vector<std::unique_ptr<eval::Policy>> owned;
      std::vector<eval::NamedPolicy> named;
      for (const auto& spec : ro_policies) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0)
          throw ConfigError("--policy expects id=checkpoint, got '" + spec + "'");
        owned.push_back(student::load_policy(
            robot, load_ckpt(spec.substr(eq + 1), "policy")));
        named.push_back({spec.substr(0, eq), owned.back().get()});
      }
      eval::RobustnessTable table;
      try {
        table = eval::robustness_sweep(robot, named, ro_levels,
                                       load_clips(ro_clips), ro_seeds);
      } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
      }
      const auto text = eval::format_robustness(table);
      out << text;
      if (!ro_out.empty()) {
        fs::create_directories(ro_out);
        write_text_file(fs::path(ro_out) / "robustness.jsonl",
                        eval::robustness_to_jsonl(table));
        write_text_file(fs::path(ro_out) / "robustness.txt", text);
      }
    };
  });

  // emit-plots
  auto* ep = app.add_subcommand("emit-plots", "Tidy CSV for plotting");
  std::string ep_kind, ep_out;
  std::vector<std::string> ep_in;
  ep->add_option("--kind", ep_kind,
                 "training_curve, ablation_table, robustness_table or "
                 "dataset_comparison")
      ->required();
  ep->add_option("--in", ep_in)->required();
  ep->add_option("--out", ep_out, "CSV file")->required();
  ep->callback([&] {
    action = [&] {
      std::vector<fs::path> inputs(ep_in.begin(), ep_in.end());
      const auto t = emit_plot_data(plot_kind_from_string(ep_kind), inputs);
      write_text_file(ep_out, to_csv(t));
      out << "wrote " << ep_out << " (" << t.rows.size() << " rows)\n";
    };
  });

  // pipeline
  auto* pl = app.add_subcommand("pipeline", "Run pipeline stages from a run config");
  std::string pl_config, pl_out;
  std::vector<std::string> pl_stages = {"generate", "curate", "train-teacher",
                                        "distill", "eval"};
  std::uint64_t pl_seed = 0;
  auto* pl_seed_opt = pl->add_option("--seed", pl_seed, "Overrides the config seed");
  pl->add_option("--config", pl_config, "Run config JSON")->required();
  pl->add_option("--stages", pl_stages, "Subset of stages");
  pl->add_option("--out-dir", pl_out, "Overrides the config out_dir");
  pl->callback([&] {
    action = [&] {
      json j = read_config(pl_config);
      if (*pl_seed_opt) j["seed"] = pl_seed;
      j["jobs"] = g.jobs;
      auto cfg = run_config_from_json(j, fs::path(pl_config).parent_path());
      if (!pl_out.empty()) cfg.out_dir = pl_out;
      if (!g.robot.empty()) cfg.robot = g.robot;
      const auto cache = cache_dir_of(g);
      if (!cache.empty()) cfg.cache_dir = cache;
      std::vector<Stage> stages;
      for (const auto& s : pl_stages) stages.push_back(stage_from_string(s));
      const auto r = run_pipeline(cfg, stages, &out);
      out << "manifest " << (cfg.out_dir / "manifest.json").string() << ": "
          << r.manifest["artifacts"].size() << " artifacts, "
          << r.trained_models << " models trained, " << r.cache_hits
          << " cache hits\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }
  try {
    if (action) action();
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace wbt::app
