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

#include "wbt/app/plot_data.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "wbt/app/pipeline.hpp"
#include "wbt/eval/ablation.hpp"
#include "wbt/eval/robustness.hpp"

namespace wbt::app {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(PlotKind k) {
  switch (k) {
    case PlotKind::kTrainingCurve: return "training_curve";
    case PlotKind::kAblationTable: return "ablation_table";
    case PlotKind::kRobustnessTable: return "robustness_table";
    case PlotKind::kDatasetComparison: return "dataset_comparison";
  }
  return "?";
}

PlotKind plot_kind_from_string(const std::string& s) {
  for (auto k : {PlotKind::kTrainingCurve, PlotKind::kAblationTable,
                 PlotKind::kRobustnessTable, PlotKind::kDatasetComparison})
    if (s == to_string(k)) return k;
  throw ConfigError("unknown plot kind '" + s + "'");
}

std::vector<std::string> plot_columns(PlotKind kind) {
  switch (kind) {
    case PlotKind::kTrainingCurve:
      return {"run", "iteration", "metric", "value"};
    case PlotKind::kAblationTable:
      return {"section", "method", "group", "metric", "value"};
    case PlotKind::kRobustnessTable:
      return {"policy", "level", "metric", "value"};
    case PlotKind::kDatasetComparison:
      return {"dataset", "clip", "metric", "value"};
  }
  return {};
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_input(const fs::path& p) {
  if (!fs::exists(p)) throw DependencyError("missing input " + p.string());
  return read_text_file(p);
}

bool blank(const std::string& text) {
  return text.find_first_not_of(" \t\r\n") == std::string::npos;
}

// Every non-empty line after the header must carry `fields`; `row_fields`
// are checked inside "row" when present.
void check_records(const std::string& text, const fs::path& source,
                   const std::vector<const char*>& fields,
                   const std::vector<const char*>& row_fields) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError(source.string() + ":" + std::to_string(lineno) +
                        ": " + e.what());
    }
    for (const char* f : fields)
      if (!j.contains(f))
        throw ConfigError(source.string() + ":" + std::to_string(lineno) +
                          ": missing column '" + f + "'");
    if (!j.contains("row")) continue;
    for (const char* f : row_fields)
      if (!j["row"].contains(f))
        throw ConfigError(source.string() + ":" + std::to_string(lineno) +
                          ": missing column '" + f + "'");
  }
}

const std::vector<const char*> kRowFields = {
    "clip", "seed", "success", "mpkpe", "vel_dist", "acc_dist",
    "termination", "frames"};

void training_curve(const fs::path& p, PlotTable& t) {
  const std::string text = read_input(p);
  std::string run = p.stem().string();
  const std::string suffix = "_log";
  if (run.size() > suffix.size() &&
      run.compare(run.size() - suffix.size(), suffix.size(), suffix) == 0)
    run.resize(run.size() - suffix.size());
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError(p.string() + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
    if (!j.contains("iteration") || !j["iteration"].is_number_integer())
      throw ConfigError(p.string() + ":" + std::to_string(lineno) +
                        ": missing column 'iteration'");
    const std::string it = std::to_string(j["iteration"].get<long>());
    for (const auto& item : j.items()) {
      if (item.key() == "iteration" || !item.value().is_number()) continue;
      t.rows.push_back(
          {run, it, item.key(), num(item.value().get<double>())});
    }
  }
}

void ablation_table(const fs::path& p, PlotTable& t) {
  const std::string text = read_input(p);
  if (blank(text)) return;
  check_records(text, p, {"cell", "section", "method", "ok", "config_hash"},
                kRowFields);
  for (const auto& r : eval::ablation_from_jsonl(text).rows) {
    if (!r.ok || r.rows.empty()) continue;
    const auto a = r.summary();
    auto add = [&](const char* group, const char* metric, double v) {
      t.rows.push_back({r.section, r.method, group, metric, num(v)});
    };
    add("all", "sr", a.sr);
    add("all", "mpkpe", a.mpkpe_all);
    add("all", "vel_dist", a.vel_all);
    add("all", "acc_dist", a.acc_all);
    add("successful", "mpkpe", a.mpkpe_succ);
    add("successful", "vel_dist", a.vel_succ);
    add("successful", "acc_dist", a.acc_succ);
  }
}

void robustness_table(const fs::path& p, PlotTable& t) {
  const std::string text = read_input(p);
  if (blank(text)) return;
  check_records(text, p, {"cell", "policy", "level", "row"}, kRowFields);
  for (const auto& r : eval::robustness_from_jsonl(text).rows) {
    if (r.rows.empty()) continue;
    const auto a = r.summary();
    const std::string level = std::to_string(r.level);
    t.rows.push_back({r.policy_id, level, "sr", num(a.sr)});
    t.rows.push_back({r.policy_id, level, "mpkpe", num(a.mpkpe_all)});
  }
}

void dataset_comparison(const fs::path& p, PlotTable& t) {
  if (!fs::exists(p / "index.json"))
    throw DependencyError("missing clip set " + (p / "index.json").string());
  const std::string dataset = p.filename().string();
  for (const auto& c : load_clip_set(p)) {
    double qd_sum = 0.0, qd_max = 0.0, speed = 0.0;
    double zmin = INFINITY, zmax = -INFINITY;
    for (const auto& f : c.frames) {
      qd_sum += f.qdot.cwiseAbs().mean();
      qd_max = std::max(qd_max, f.qdot.cwiseAbs().maxCoeff());
      speed += f.root_linvel.norm();
      zmin = std::min(zmin, f.root_pos(1));
      zmax = std::max(zmax, f.root_pos(1));
    }
    const double n = c.size();
    auto add = [&](const char* metric, double v) {
      t.rows.push_back({dataset, c.name, metric, num(v)});
    };
    add("frames", n);
    add("duration_s", c.duration());
    add("mean_abs_qdot", qd_sum / n);
    add("max_abs_qdot", qd_max);
    add("mean_root_speed", speed / n);
    add("root_height_range", zmax - zmin);
  }
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line, int lineno) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted)
    throw InvalidInput("csv line " + std::to_string(lineno) +
                       ": unterminated quote");
  out.push_back(std::move(cur));
  return out;
}

}  // namespace

PlotTable emit_plot_data(PlotKind kind, const std::vector<fs::path>& inputs) {
  PlotTable t;
  t.columns = plot_columns(kind);
  for (const auto& p : inputs) {
    switch (kind) {
      case PlotKind::kTrainingCurve: training_curve(p, t); break;
      case PlotKind::kAblationTable: ablation_table(p, t); break;
      case PlotKind::kRobustnessTable: robustness_table(p, t); break;
      case PlotKind::kDatasetComparison: dataset_comparison(p, t); break;
    }
  }
  return t;
}

std::string to_csv(const PlotTable& table) {
  std::ostringstream out;
  auto write = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out << (i ? "," : "") << quote(cells[i]);
    out << "\n";
  };
  write(table.columns);
  for (const auto& r : table.rows) write(r);
  return out.str();
}

PlotTable plot_table_from_csv(const std::string& text, PlotKind kind) {
  std::istringstream in(text);
  std::string line;
  PlotTable t;
  t.columns = plot_columns(kind);
  if (!std::getline(in, line)) throw ConfigError("csv: missing header");
  const auto header = split_csv_line(line, 1);
  for (std::size_t i = 0; i < std::max(header.size(), t.columns.size()); ++i) {
    if (i >= header.size())
      throw ConfigError("csv: missing column '" + t.columns[i] + "'");
    if (i >= t.columns.size() || header[i] != t.columns[i])
      throw ConfigError("csv: unexpected column '" + header[i] + "'");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv_line(line, lineno);
    if (cells.size() != t.columns.size())
      throw ConfigError("csv line " + std::to_string(lineno) + ": expected " +
                        std::to_string(t.columns.size()) + " cells");
    plot_value(cells.back());
    t.rows.push_back(std::move(cells));
  }
  return t;
}

double plot_value(const std::string& cell) {
  if (cell == "nan") return NAN;
  if (cell == "inf") return INFINITY;
  if (cell == "-inf") return -INFINITY;
  // strtod rather than stod: stod rejects subnormal values.
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size())
    throw ConfigError("column 'value': not a number '" + cell + "'");
  return v;
}

}  // namespace wbt::app
