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

#include "wbt/eval/ablation.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "wbt/json_util.hpp"

namespace wbt::eval {

using nlohmann::json;

std::string clips_hash(const std::vector<motion::MotionClip>& clips) {
  std::uint64_t h = fnv1a("clips");
  for (const auto& c : clips) {
    const std::uint64_t ch = fnv1a(motion::clip_to_string(c));
    h = fnv1a(hex64(h) + hex64(ch));
  }
  return hex64(h);
}

std::string checkpoint_hash(const nn::Checkpoint& ckpt) {
  return hex64(fnv1a(nn::checkpoint_to_string(ckpt)));
}

std::string config_hash(const student::StudentConfig& c) {
  json j = student::to_json(c);
  j.erase("jobs");
  return json_hash(j);
}

std::string config_hash(const teacher::TeacherConfig& c) {
  json j = teacher::to_json(c);
  j.erase("jobs");
  return json_hash(j);
}

std::filesystem::path CheckpointCache::path(const std::string& key) const {
  return dir_ / (key + ".json");
}

nn::Checkpoint CheckpointCache::get_or_train(
    const std::string& key, const std::function<nn::Checkpoint()>& train,
    bool* hit) const {
  if (enabled() && std::filesystem::exists(path(key))) {
    if (hit) *hit = true;
    return nn::load_checkpoint(path(key));
  }
  if (hit) *hit = false;
  nn::Checkpoint ck = train();
  if (enabled()) {
    std::filesystem::create_directories(dir_);
    nn::save_checkpoint(ck, path(key));
  }
  return ck;
}

nn::Checkpoint distill_cached(const sim::RobotModel& model,
                              const std::vector<motion::MotionClip>& clips,
                              const nn::Checkpoint& teacher,
                              const student::StudentConfig& config,
                              const CheckpointCache& cache, bool* hit) {
  const std::string key =
      "student-" + json_hash({config_hash(config), checkpoint_hash(teacher),
                              clips_hash(clips)});
  return cache.get_or_train(
      key,
      [&] {
        return student::train_student(model, clips, teacher, config)
            .checkpoint;
      },
      hit);
}

nn::Checkpoint scratch_cached(const sim::RobotModel& model,
                              const std::vector<motion::MotionClip>& clips,
                              const teacher::TeacherConfig& config,
                              const student::StudentSpec& spec,
                              const CheckpointCache& cache, bool* hit) {
  const std::string key =
      "scratch-" + json_hash({config_hash(config), spec.history, spec.window,
                              clips_hash(clips)});
  return cache.get_or_train(
      key,
      [&] {
        student::DeployObsBuilder proto(spec.history, spec.window,
                                        model.n_joints(), model.n_keypoints());
        teacher::TrainIo io;
        io.name = "scratch";
        return teacher::train_teacher(model, clips, config, proto, io)
            .checkpoint;
      },
      hit);
}

AblationGrid AblationGrid::single_cell(const student::StudentConfig& base) {
  AblationGrid g;
  g.base = base;
  g.baselines = false;
  g.explicit_ref.clear();
  g.kl_residual.clear();
  g.kl_coef = {base.beta};
  g.window.clear();
  g.latent_dim.clear();
  g.latent_mode.clear();
  g.seeds = {base.seed};
  return g;
}

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  std::string s = buf;
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::vector<AblationCell> expand_grid(const AblationGrid& g) {
  std::vector<AblationCell> cells;
  auto student_cell = [&](const std::string& section, const std::string& method,
                          const std::function<void(student::StudentConfig&)>& set) {
    AblationCell c;
    c.section = section;
    c.method = method;
    c.student = g.base;
    set(c.student);
    cells.push_back(std::move(c));
  };
  if (g.baselines) {
    const std::string s = "(a) Compare with Baselines";
    student_cell(s, "DAgger without CVAE", [](auto& c) {
      c.spec.arch = student::StudentArch::kMlp;
    });
    AblationCell scratch;
    scratch.section = s;
    scratch.method = "Train from Scratch";
    scratch.kind = CellKind::kScratch;
    scratch.student = g.base;
    scratch.scratch = g.scratch;
    cells.push_back(std::move(scratch));
    student_cell(s, "CVAE Student", [](auto&) {});
  }
  for (bool on : g.explicit_ref)
    student_cell("(b) Ablation with Architecture Design",
                 on ? "Actor with Explicit Reference"
                    : "Actor without Explicit Reference",
                 [on](auto& c) { c.spec.explicit_ref = on; });
  for (bool on : g.kl_residual)
    student_cell("(c) Ablation with KL Residual",
                 on ? "KL with Residual" : "KL without Residual",
                 [on](auto& c) { c.spec.kl_residual = on; });
  for (double b : g.kl_coef)
    student_cell("(d) Ablation with KL Coefficient", "KL Coef = " + number(b),
                 [b](auto& c) { c.beta = b; });
  for (int w : g.window)
    student_cell("(e) Ablation with Future Window Size",
                 "Window Size = " + std::to_string(w),
                 [w](auto& c) { c.spec.window = w; });
  for (int l : g.latent_dim)
    student_cell("(f) Ablation with Latent Dimension",
                 "Latent Dimension = " + std::to_string(l),
                 [l](auto& c) { c.spec.latent_dim = l; });
  for (auto m : g.latent_mode)
    student_cell("(g) Analysis of CVAE diversity",
                 m == student::LatentMode::kStochastic
                     ? "Decoder with Stochastic Latent"
                     : "Decoder with Deterministic Latent",
                 [m](auto& c) { c.spec.latent_mode = m; });
  return cells;
}

namespace {

std::string cell_hash(const AblationCell& c,
                      const std::vector<std::uint64_t>& seeds) {
  json j = {{"kind", c.kind == CellKind::kStudent ? "student" : "scratch"},
            {"seeds", seeds}};
  j["config"] = c.kind == CellKind::kStudent ? config_hash(c.student)
                                             : config_hash(c.scratch);
  if (c.kind == CellKind::kScratch)
    j["obs"] = {c.student.spec.history, c.student.spec.window};
  return json_hash(j);
}

}  // namespace

AblationTable run_ablation(const sim::RobotModel& model,
                           const std::vector<motion::MotionClip>& train_clips,
                           const std::vector<motion::MotionClip>& eval_clips,
                           const nn::Checkpoint& teacher,
                           const AblationGrid& grid,
                           const AblationOptions& options) {
  if (grid.seeds.empty() || grid.eval_seeds.empty())
    throw InvalidInput("ablation grid needs training and evaluation seeds");
  AblationTable table;
  // Cells sharing a configuration (the base row of each section) are
  // trained and evaluated once.
  std::map<std::string, AblationRow> done;
  for (const auto& cell : expand_grid(grid)) {
    const std::string hash = cell_hash(cell, grid.seeds);
    AblationRow row;
    auto it = done.find(hash);
    if (it != done.end()) {
      row = it->second;
    } else {
      row.config_hash = hash;
      try {
        for (auto seed : grid.seeds) {
          bool hit = false;
          nn::Checkpoint ck;
          if (cell.kind == CellKind::kStudent) {
            auto c = cell.student;
            c.seed = seed;
            ck = distill_cached(model, train_clips, teacher, c, options.cache,
                                &hit);
          } else {
            auto c = cell.scratch;
            c.seed = seed;
            ck = scratch_cached(model, train_clips, c, cell.student.spec,
                                options.cache, &hit);
          }
          row.cache_hits += hit ? 1 : 0;
          auto policy = student::load_policy(model, ck);
          const auto report = evaluate_suite(model, *policy, eval_clips,
                                             options.noise, grid.eval_seeds);
          row.rows.insert(row.rows.end(), report.rows.begin(),
                          report.rows.end());
        }
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
        row.rows.clear();
      }
      done[hash] = row;
    }
    row.section = cell.section;
    row.method = cell.method;
    if (options.on_cell) options.on_cell(row);
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

std::string cellf(double v, int width, const char* fmt) {
  char buf[64];
  if (std::isnan(v))
    std::snprintf(buf, sizeof buf, "%*s", width, "-");
  else
    std::snprintf(buf, sizeof buf, fmt, width, v);
  return buf;
}

}  // namespace

std::string format_ablation(const AblationTable& table) {
  std::ostringstream out;
  char head[256];
  std::snprintf(head, sizeof head, "%-36s | %-36s | %s\n", "Method",
                "All", "Successful");
  out << head;
  std::snprintf(head, sizeof head,
                "%-36s | %7s %9s %9s %9s | %9s %9s %9s\n", "", "SR", "MPKPE",
                "Vel-Dist", "Acc-Dist", "MPKPE", "Vel-Dist", "Acc-Dist");
  out << head;
  std::string section;
  for (const auto& r : table.rows) {
    if (r.section != section) {
      section = r.section;
      out << std::string(100, '-') << "\n" << section << "\n";
    }
    char name[40];
    std::snprintf(name, sizeof name, "%-36.36s", r.method.c_str());
    out << name << " | ";
    if (!r.ok) {
      out << "failed: " << r.error << "\n";
      continue;
    }
    const auto a = r.summary();
    out << cellf(a.sr, 7, "%*.2f") << " " << cellf(a.mpkpe_all, 9, "%*.4f")
        << " " << cellf(a.vel_all, 9, "%*.3f") << " "
        << cellf(a.acc_all, 9, "%*.2f") << " | "
        << cellf(a.mpkpe_succ, 9, "%*.4f") << " "
        << cellf(a.vel_succ, 9, "%*.3f") << " "
        << cellf(a.acc_succ, 9, "%*.2f") << "\n";
  }
  out << "MPKPE in m, Vel-Dist in rad/s, Acc-Dist in rad/s^2\n";
  return out.str();
}

std::string ablation_to_jsonl(const AblationTable& table) {
  std::ostringstream out;
  std::size_t records = 0;
  for (const auto& r : table.rows) records += r.ok ? r.rows.size() : 1;
  out << json{{"format", "wbtrack-ablation"},
              {"format_version", 1},
              {"n_cells", table.rows.size()},
              {"n_records", records}}
             .dump()
      << "\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    json base = {{"cell", i},
                 {"section", r.section},
                 {"method", r.method},
                 {"ok", r.ok},
                 {"config_hash", r.config_hash}};
    if (!r.ok) {
      base["error"] = r.error;
      out << base.dump() << "\n";
      continue;
    }
    for (const auto& row : r.rows) {
      json j = base;
      j["row"] = row_to_json(row);
      out << j.dump() << "\n";
    }
  }
  return out.str();
}

AblationTable ablation_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  AblationTable table;
  std::size_t n_cells = 0, n_records = 0, records = 0;
  int lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (lineno == 1) {
        if (j.value("format", "") != "wbtrack-ablation")
          throw InvalidInput("not a wbtrack ablation table");
        n_cells = j.at("n_cells").get<std::size_t>();
        n_records = j.at("n_records").get<std::size_t>();
        table.rows.resize(n_cells);
        continue;
      }
      ++records;
      const auto cell = j.at("cell").get<std::size_t>();
      if (cell >= n_cells) throw InvalidInput("cell index out of range");
      auto& r = table.rows[cell];
      r.section = j.at("section").get<std::string>();
      r.method = j.at("method").get<std::string>();
      r.ok = j.at("ok").get<bool>();
      r.config_hash = j.at("config_hash").get<std::string>();
      if (r.ok)
        r.rows.push_back(row_from_json(j.at("row")));
      else
        r.error = j.value("error", "");
    }
  } catch (const json::exception& e) {
    throw InvalidInput("ablation line " + std::to_string(lineno) + ": " +
                       e.what());
  }
  if (lineno == 0) throw InvalidInput("ablation table: empty input");
  if (records != n_records)
    throw InvalidInput("ablation table: header promises " +
                       std::to_string(n_records) + " records, found " +
                       std::to_string(records));
  return table;
}

}  // namespace wbt::eval
