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

#include "wbt/eval/metrics.hpp"

#include <limits>
#include <sstream>

#include <json.hpp>

#include "wbt/sim/kinematics.hpp"

namespace wbt::eval {

using nlohmann::json;

void EpisodeTrace::push(const Points2& kp, const Vec& qi, const Vec& qdoti) {
  keypoints.push_back(kp);
  q.push_back(qi);
  qdot.push_back(qdoti);
}

TrackingRow score_trace(const motion::MotionClip& clip,
                        const EpisodeTrace& trace) {
  const int n = trace.size();
  if (n == 0 || n > clip.size())
    throw InvalidInput("score_trace: trace has " + std::to_string(n) +
                       " frames for a clip of " +
                       std::to_string(clip.size()));
  TrackingRow row;
  row.clip = clip.name;
  row.frames = n;
  double kp_sum = 0.0;
  double vel_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& ref = clip.frames[i];
    kp_sum += (trace.keypoints[i] - ref.keypoints).colwise().norm().mean();
    vel_sum += (trace.qdot[i] - ref.qdot).cwiseAbs().mean();
  }
  row.mpkpe = kp_sum / n;
  row.vel_dist = vel_sum / n;
  if (n >= 3) {
    const double inv = clip.fps / 2.0;
    double acc_sum = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
      const Vec acc = (trace.qdot[i + 1] - trace.qdot[i - 1]) * inv;
      const Vec ref_acc =
          (clip.frames[i + 1].qdot - clip.frames[i - 1].qdot) * inv;
      acc_sum += (acc - ref_acc).cwiseAbs().mean();
    }
    row.acc_dist = acc_sum / (n - 2);
  }
  return row;
}

TrackingRow evaluate_clip(const sim::RobotModel& model, Policy& policy,
                          const motion::MotionClip& clip,
                          const NoiseSpec& noise, std::uint64_t seed) {
  if (clip.size() < 2)
    throw InvalidInput("evaluate_clip: clip '" + clip.name +
                       "' needs at least 2 frames");
  Rng rng(seed);
  policy.reset();
  sim::SimState state = sim::state_from_frame(clip.frames[0]);
  EpisodeTrace trace;
  auto record = [&](const sim::SimState& s) {
    trace.push(sim::forward_kinematics(model, s.root_pos, s.root_angle, s.q),
               s.q, s.qdot);
  };
  record(state);
  std::string reason = "none";
  for (int f = 0; f + 1 < clip.size(); ++f) {
    try {
      const Vec target = policy.act(state, clip, f, noise, rng);
      state = sim::control_step(model, state, target);
    } catch (const sim::SimulationDiverged&) {
      reason = "diverged";
      break;
    }
    if (!state.finite()) {
      reason = "diverged";
      break;
    }
    record(state);
    const auto term =
        sim::check_termination(model, state, clip.frames[f + 1].keypoints);
    if (term != sim::Termination::kAlive) {
      reason = sim::to_string(term);
      break;
    }
  }
  TrackingRow row = score_trace(clip, trace);
  row.seed = seed;
  row.termination = reason;
  row.success = reason == "none" && trace.size() == clip.size();
  return row;
}

TrackingRow replay_clip(const motion::MotionClip& clip) {
  EpisodeTrace trace;
  for (const auto& f : clip.frames) trace.push(f.keypoints, f.q, f.qdot);
  TrackingRow row = score_trace(clip, trace);
  row.success = true;
  return row;
}

Aggregate aggregate(const std::vector<TrackingRow>& rows) {
  if (rows.empty()) throw InvalidInput("aggregate: no rows");
  Aggregate a;
  a.n_rows = static_cast<int>(rows.size());
  for (const auto& r : rows) {
    a.mpkpe_all += r.mpkpe;
    a.vel_all += r.vel_dist;
    a.acc_all += r.acc_dist;
    if (r.success) {
      ++a.n_success;
      a.mpkpe_succ += r.mpkpe;
      a.vel_succ += r.vel_dist;
      a.acc_succ += r.acc_dist;
    }
  }
  a.sr = 100.0 * a.n_success / a.n_rows;
  a.mpkpe_all /= a.n_rows;
  a.vel_all /= a.n_rows;
  a.acc_all /= a.n_rows;
  if (a.n_success > 0) {
    a.mpkpe_succ /= a.n_success;
    a.vel_succ /= a.n_success;
    a.acc_succ /= a.n_success;
  } else {
    a.mpkpe_succ = a.vel_succ = a.acc_succ =
        std::numeric_limits<double>::quiet_NaN();
  }
  return a;
}

TrackingReport evaluate_suite(const sim::RobotModel& model, Policy& policy,
                              const std::vector<motion::MotionClip>& clips,
                              const NoiseSpec& noise,
                              const std::vector<std::uint64_t>& seeds) {
  if (clips.empty()) throw InvalidInput("evaluate_suite: empty clip set");
  if (seeds.empty()) throw InvalidInput("evaluate_suite: no seeds");
  TrackingReport report;
  report.policy_id = policy.id();
  report.noise_level = noise.level;
  report.seeds = seeds;
  for (auto seed : seeds)
    for (const auto& clip : clips)
      report.rows.push_back(evaluate_clip(model, policy, clip, noise, seed));
  return report;
}

json row_to_json(const TrackingRow& r) {
  return {{"clip", r.clip},         {"seed", r.seed},
          {"success", r.success},   {"mpkpe", r.mpkpe},
          {"vel_dist", r.vel_dist}, {"acc_dist", r.acc_dist},
          {"termination", r.termination}, {"frames", r.frames}};
}

TrackingRow row_from_json(const json& j) {
  TrackingRow r;
  r.clip = j.at("clip").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.success = j.at("success").get<bool>();
  r.mpkpe = j.at("mpkpe").get<double>();
  r.vel_dist = j.at("vel_dist").get<double>();
  r.acc_dist = j.at("acc_dist").get<double>();
  r.termination = j.at("termination").get<std::string>();
  r.frames = j.at("frames").get<int>();
  return r;
}

std::string report_to_jsonl(const TrackingReport& report) {
  std::ostringstream out;
  json header = {{"format", "wbtrack-report"},
                 {"format_version", 1},
                 {"policy_id", report.policy_id},
                 {"noise_level", report.noise_level},
                 {"seeds", report.seeds},
                 {"n_rows", report.rows.size()}};
  out << header.dump() << "\n";
  for (const auto& r : report.rows) out << row_to_json(r).dump() << "\n";
  return out.str();
}

TrackingReport report_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  TrackingReport report;
  std::size_t expected = 0;
  int lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (lineno == 1) {
        if (j.value("format", "") != "wbtrack-report")
          throw InvalidInput("report: not a wbtrack report");
        report.policy_id = j.at("policy_id").get<std::string>();
        report.noise_level = j.at("noise_level").get<int>();
        report.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        expected = j.at("n_rows").get<std::size_t>();
        continue;
      }
      report.rows.push_back(row_from_json(j));
    }
  } catch (const json::exception& e) {
    throw InvalidInput("report line " + std::to_string(lineno) + ": " +
                       e.what());
  }
  if (lineno == 0) throw InvalidInput("report: empty input");
  if (report.rows.size() != expected)
    throw InvalidInput("report: header promises " + std::to_string(expected) +
                       " rows, found " + std::to_string(report.rows.size()));
  return report;
}

void save_report(const TrackingReport& report,
                 const std::filesystem::path& path) {
  write_text_file(path, report_to_jsonl(report));
}

TrackingReport load_report(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw DependencyError("missing report " + path.string());
  return report_from_jsonl(read_text_file(path));
}

}  // namespace wbt::eval
