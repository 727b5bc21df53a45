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

#ifndef WBT_APP_PLOT_DATA_HPP_
#define WBT_APP_PLOT_DATA_HPP_

#include <filesystem>
#include <string>
#include <vector>

namespace wbt::app {

enum class PlotKind {
  kTrainingCurve,
  kAblationTable,
  kRobustnessTable,
  kDatasetComparison,
};

const char* to_string(PlotKind k);
PlotKind plot_kind_from_string(const std::string& s);  // throws ConfigError

// Tidy table: one observation per row, the measured value in the last
// column. Values are printed with 17 significant digits.
struct PlotTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

// Columns per kind:
//   training_curve:     run, iteration, metric, value
//   ablation_table:     section, method, group, metric, value
//   robustness_table:   policy, level, metric, value
//   dataset_comparison: dataset, clip, metric, value
std::vector<std::string> plot_columns(PlotKind kind);

// Inputs: training logs (*_log.jsonl), ablation or robustness JSONL tables,
// or clip-set directories. Missing inputs throw DependencyError; records
// lacking a field throw ConfigError naming that column.
PlotTable emit_plot_data(PlotKind kind,
                         const std::vector<std::filesystem::path>& inputs);

std::string to_csv(const PlotTable& table);
// Checks the header against `kind`, naming the first offending column.
PlotTable plot_table_from_csv(const std::string& text, PlotKind kind);

double plot_value(const std::string& cell);

}  // namespace wbt::app

#endif  // WBT_APP_PLOT_DATA_HPP_
