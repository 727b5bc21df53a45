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

#include "wbt/sim/robot_model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wbt::sim {

using nlohmann::json;

double RobotModel::link_inertia(int i) const {
  if (!link_inertias.empty()) return link_inertias[i];
  return link_masses[i] * link_lengths[i] * link_lengths[i] / 12.0;
}

double RobotModel::total_mass() const {
  double m = root_mass;
  for (double x : link_masses) m += x;
  return m;
}

Vec RobotModel::joint_lo() const {
  Vec lo(n_joints());
  for (int i = 0; i < n_joints(); ++i) lo(i) = joint_limits[i](0);
  return lo;
}

Vec RobotModel::joint_hi() const {
  Vec hi(n_joints());
  for (int i = 0; i < n_joints(); ++i) hi(i) = joint_limits[i](1);
  return hi;
}

Vec RobotModel::clamp_to_limits(const Vec& q) const {
  return q.cwiseMax(joint_lo()).cwiseMin(joint_hi());
}

void RobotModel::validate() const {
  const auto n = static_cast<std::size_t>(n_joints());
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidInput("robot model: " + what);
  };
  require(n > 0, "at least one link required");
  require(link_parents.size() == n, "link_parents size");
  require(link_rest_angles.size() == n, "link_rest_angles size");
  require(link_masses.size() == n, "link_masses size");
  require(link_coms.size() == n, "link_coms size");
  require(link_inertias.empty() || link_inertias.size() == n,
          "link_inertias size");
  require(link_names.empty() || link_names.size() == n, "link_names size");
  require(joint_limits.size() == n, "joint_limits size");
  require(torque_limits.size() == n, "torque_limits size");
  require(pd_kp.size() == n, "pd_kp size");
  require(pd_kd.size() == n, "pd_kd size");
  require(armature.size() == n, "armature size");
  for (std::size_t i = 0; i < n; ++i) {
    const auto tag = " (link " + std::to_string(i) + ")";
    require(link_parents[i] >= -1 && link_parents[i] < static_cast<int>(i),
            "link parent must precede the link" + tag);
    require(link_lengths[i] > 0.0, "link_lengths must be > 0" + tag);
    require(link_masses[i] > 0.0, "link_masses must be > 0" + tag);
    require(joint_limits[i](0) < joint_limits[i](1),
            "joint_limits lo < hi" + tag);
    require(torque_limits[i] >= 0.0, "torque_limits must be >= 0" + tag);
    require(armature[i] >= 0.0, "armature must be >= 0" + tag);
    require(link_inertias.empty() || link_inertias[i] >= 0.0,
            "link_inertias must be >= 0" + tag);
  }
  require(root_mass > 0.0 && root_inertia > 0.0, "root mass/inertia > 0");
  require(friction_coeff >= 0.0, "friction_coeff must be >= 0");
  require(contact_stiffness >= 0.0 && contact_damping >= 0.0,
          "contact parameters must be >= 0");
  for (int k : keypoint_links)
    require(k >= 0 && k < n_joints(), "keypoint_links out of range");
  for (int k : foot_links)
    require(k >= 0 && k < n_joints(), "foot_links out of range");
}

RobotModel default_biped() {
  RobotModel m;
  const double h = kPi / 2;
  m.link_names = {"torso",   "thigh_l", "thigh_r", "shank_l",
                  "shank_r", "foot_l",  "foot_r"};
  m.link_parents = {-1, -1, -1, 1, 2, 3, 4};
  m.link_rest_angles = {h, -h, -h, 0.0, 0.0, h, h};
  m.link_lengths = {0.5, 0.4, 0.4, 0.4, 0.4, 0.16, 0.16};
  m.link_masses = {12.0, 4.0, 4.0, 3.0, 3.0, 0.8, 0.8};
  m.link_coms = {0.25, 0.2, 0.2, 0.2, 0.2, 0.06, 0.06};
  m.root_mass = 8.0;
  m.root_inertia = 0.08;
  m.joint_limits = {{-1.0, 1.0},  {-0.8, 1.8},  {-0.8, 1.8}, {-2.4, 0.05},
                    {-2.4, 0.05}, {-0.8, 0.8},  {-0.8, 0.8}};
  m.torque_limits = {150.0, 200.0, 200.0, 250.0, 250.0, 120.0, 120.0};
  m.pd_kp = {400.0, 500.0, 500.0, 600.0, 600.0, 400.0, 400.0};
  m.pd_kd = {8.0, 10.0, 10.0, 12.0, 12.0, 6.0, 6.0};
  m.armature = std::vector<double>(7, 0.05);
  m.keypoint_links = {0, 1, 2, 3, 4, 5, 6};
  m.foot_links = {5, 6};
  return m;
}

RobotModel chain_model(const std::vector<double>& lengths,
                       const std::vector<double>& masses) {
  RobotModel m;
  const auto n = lengths.size();
  for (std::size_t i = 0; i < n; ++i) {
    m.link_names.push_back("link" + std::to_string(i));
    m.link_parents.push_back(static_cast<int>(i) - 1);
    m.link_rest_angles.push_back(0.0);
    m.link_lengths.push_back(lengths[i]);
    m.link_masses.push_back(masses.at(i));
    m.link_coms.push_back(lengths[i] / 2);
    m.joint_limits.push_back({-10.0, 10.0});
    m.torque_limits.push_back(0.0);
    m.pd_kp.push_back(0.0);
    m.pd_kd.push_back(0.0);
    m.armature.push_back(0.0);
    m.keypoint_links.push_back(static_cast<int>(i));
  }
  m.root_mass = 1.0;
  m.root_inertia = 0.01;
  m.friction_coeff = 0.0;
  m.contact_stiffness = 0.0;
  m.contact_damping = 0.0;
  m.fixed_base = true;
  return m;
}

namespace {

json limits_to_json(const std::vector<Vec2>& lims) {
  json a = json::array();
  for (const auto& l : lims) a.push_back({l(0), l(1)});
  return a;
}

template <typename T>
T get_field(const json& j, const char* key) {
  if (!j.contains(key))
    throw ConfigError(std::string("robot config: missing field '") + key +
                      "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("robot config: field '") + key +
                      "': " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get_field<T>(j, key) : fallback;
}

}  // namespace

std::string to_json_string(const RobotModel& m) {
  json j;
  j["format_version"] = RobotModel::kFormatVersion;
  j["n_joints"] = m.n_joints();
  j["link_names"] = m.link_names;
  j["link_parents"] = m.link_parents;
  j["link_rest_angles"] = m.link_rest_angles;
  j["link_lengths"] = m.link_lengths;
  j["link_masses"] = m.link_masses;
  j["link_coms"] = m.link_coms;
  j["link_inertias"] = m.link_inertias;
  j["root_mass"] = m.root_mass;
  j["root_inertia"] = m.root_inertia;
  j["joint_limits"] = limits_to_json(m.joint_limits);
  j["torque_limits"] = m.torque_limits;
  j["pd_kp"] = m.pd_kp;
  j["pd_kd"] = m.pd_kd;
  j["armature"] = m.armature;
  j["contact_stiffness"] = m.contact_stiffness;
  j["contact_damping"] = m.contact_damping;
  j["friction_coeff"] = m.friction_coeff;
  j["friction_viscous"] = m.friction_viscous;
  j["gravity"] = m.gravity;
  j["fixed_base"] = m.fixed_base;
  j["keypoint_links"] = m.keypoint_links;
  j["foot_links"] = m.foot_links;
  return j.dump(2);
}

RobotModel robot_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("robot config: parse error at byte ") +
                      std::to_string(e.byte) + ": " + e.what());
  }
  const int version = get_field<int>(j, "format_version");
  if (version != RobotModel::kFormatVersion)
    throw ConfigError("robot config: unsupported format_version " +
                      std::to_string(version));
  RobotModel m;
  m.link_parents = get_field<std::vector<int>>(j, "link_parents");
  m.link_rest_angles = get_field<std::vector<double>>(j, "link_rest_angles");
  m.link_lengths = get_field<std::vector<double>>(j, "link_lengths");
  m.link_masses = get_field<std::vector<double>>(j, "link_masses");
  m.link_coms = get_field<std::vector<double>>(j, "link_coms");
  m.link_inertias =
      get_or<std::vector<double>>(j, "link_inertias", std::vector<double>{});
  m.link_names =
      get_or<std::vector<std::string>>(j, "link_names", std::vector<std::string>{});
  m.root_mass = get_field<double>(j, "root_mass");
  m.root_inertia = get_field<double>(j, "root_inertia");
  for (const auto& l :
       get_field<std::vector<std::vector<double>>>(j, "joint_limits")) {
    if (l.size() != 2) throw ConfigError("robot config: joint_limits entry");
    m.joint_limits.emplace_back(l[0], l[1]);
  }
  m.torque_limits = get_field<std::vector<double>>(j, "torque_limits");
  m.pd_kp = get_field<std::vector<double>>(j, "pd_kp");
  m.pd_kd = get_field<std::vector<double>>(j, "pd_kd");
  m.armature = get_or<std::vector<double>>(
      j, "armature", std::vector<double>(m.link_lengths.size(), 0.0));
  m.contact_stiffness = get_field<double>(j, "contact_stiffness");
  m.contact_damping = get_field<double>(j, "contact_damping");
  m.friction_coeff = get_field<double>(j, "friction_coeff");
  m.friction_viscous = get_or<double>(j, "friction_viscous", m.friction_viscous);
  m.gravity = get_or<double>(j, "gravity", m.gravity);
  m.fixed_base = get_or<bool>(j, "fixed_base", false);
  m.keypoint_links = get_field<std::vector<int>>(j, "keypoint_links");
  m.foot_links = get_or<std::vector<int>>(j, "foot_links", std::vector<int>{});
  if (j.contains("n_joints") &&
      j["n_joints"].get<int>() != static_cast<int>(m.link_lengths.size()))
    throw ConfigError("robot config: n_joints disagrees with link_lengths");
  try {
    m.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  return m;
}

void save_robot(const RobotModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << to_json_string(model) << "\n";
}

RobotModel load_robot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read robot config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return robot_from_json_string(ss.str());
}

}  // namespace wbt::sim
