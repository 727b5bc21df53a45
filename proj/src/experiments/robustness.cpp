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

#include "wbt/eval/robustness.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace wbt::eval {

using nlohmann::json;

RobustnessTable robustness_sweep(const sim::RobotModel& model,
                                 const std::vector<NamedPolicy>& policies,
                                 const std::vector<int>& levels,
                                 const std::vector<motion::MotionClip>& clips,
                                 const std::vector<std::uint64_t>& seeds) {
  if (policies.empty()) throw InvalidInput("robustness: no policies");
  if (levels.empty()) throw InvalidInput("robustness: no noise levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 0) throw InvalidInput("robustness: negative noise level");
    if (i > 0 && levels[i] <= levels[i - 1])
      throw InvalidInput("robustness: noise levels must be strictly increasing");
  }
  for (const auto& p : policies)
    if (p.policy == nullptr)
      throw InvalidInput("robustness: policy '" + p.id + "' is null");
  RobustnessTable table;
  for (int level : levels) {
    const NoiseSpec noise = NoiseSpec::from_level(level);
    for (const auto& p : policies) {
      RobustnessRow row;
      row.policy_id = p.id;
      row.level = level;
      row.rows = evaluate_suite(model, *p.policy, clips, noise, seeds).rows;
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::string format_robustness(const RobustnessTable& table) {
  std::ostringstream out;
  int level = -1;
  char buf[160];
  for (const auto& r : table.rows) {
    if (r.level != level) {
      level = r.level;
      std::snprintf(buf, sizeof buf, "(%c) Noise Level %d\n",
                    static_cast<char>('a' + level), level);
      out << buf;
      std::snprintf(buf, sizeof buf, "  %-24s %8s %10s\n", "Method", "SR",
                    "MPKPE");
      out << buf;
    }
    const auto a = r.summary();
    std::snprintf(buf, sizeof buf, "  %-24s %8.2f %10.4f\n",
                  r.policy_id.c_str(), a.sr, a.mpkpe_all);
    out << buf;
  }
  out << "SR in %, MPKPE in m\n";
  return out.str();
}

std::string robustness_to_jsonl(const RobustnessTable& table) {
  std::ostringstream out;
  std::size_t records = 0;
  for (const auto& r : table.rows) records += r.rows.size();
  out << json{{"format", "wbtrack-robustness"},
              {"format_version", 1},
              {"n_cells", table.rows.size()},
              {"n_records", records}}
             .dump()
      << "\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    for (const auto& row : table.rows[i].rows)
      out << json{{"cell", i},
                  {"policy", table.rows[i].policy_id},
                  {"level", table.rows[i].level},
                  {"row", row_to_json(row)}}
                 .dump()
          << "\n";
  return out.str();
}

RobustnessTable robustness_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  RobustnessTable table;
  std::size_t n_cells = 0, n_records = 0, records = 0;
  int lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (lineno == 1) {
        if (j.value("format", "") != "wbtrack-robustness")
          throw InvalidInput("not a wbtrack robustness table");
        n_cells = j.at("n_cells").get<std::size_t>();
        n_records = j.at("n_records").get<std::size_t>();
        table.rows.resize(n_cells);
        continue;
      }
      ++records;
      const auto cell = j.at("cell").get<std::size_t>();
      if (cell >= n_cells) throw InvalidInput("cell index out of range");
      auto& r = table.rows[cell];
      r.policy_id = j.at("policy").get<std::string>();
      r.level = j.at("level").get<int>();
      r.rows.push_back(row_from_json(j.at("row")));
    }
  } catch (const json::exception& e) {
    throw InvalidInput("robustness line " + std::to_string(lineno) + ": " +
                       e.what());
  }
  if (lineno == 0) throw InvalidInput("robustness table: empty input");
  if (records != n_records)
    throw InvalidInput("robustness table: header promises " +
                       std::to_string(n_records) + " records, found " +
                       std::to_string(records));
  return table;
}

}  // namespace wbt::eval
