/*
 * Copyright 2026 The drivegym Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drivegym/errors.hpp"
#include "drivegym/scene.hpp"
#include "drivegym/scene_io.hpp"
#include "drivegym/synthetic.hpp"

namespace drivegym {

// One scene rollout: simulated and logged ego poses for every rolled-out
// frame (start frame included) plus the simulated agents at those frames.
struct SimulationOutput {
  std::string scene_id;
  std::size_t start_frame = 0;
  double dt = kDefaultDt;
  Extent ego_extent = kDefaultEgoExtent;
  std::vector<Pose2> simulated_ego_states;
  std::vector<Pose2> recorded_ego_states;
  std::vector<std::vector<AgentRecord>> simulated_agent_states;

  std::size_t size() const noexcept { return simulated_ego_states.size(); }

  void validate() const {
    if (simulated_ego_states.size() != recorded_ego_states.size()) {
      throw ValidationError(scene_id + ".recorded_ego_states",
                            "length differs from simulated_ego_states");
    }
    if (simulated_agent_states.size() != simulated_ego_states.size()) {
      throw ValidationError(scene_id + ".simulated_agent_states",
                            "length differs from simulated_ego_states");
    }
  }

  friend bool operator==(const SimulationOutput&,
                         const SimulationOutput&) = default;
};

namespace json_detail {

inline ojson to_json(const Pose2& p) {
  return ojson::array({p.centroid.x, p.centroid.y, p.yaw});
}

inline Pose2 pose(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(path + ": expected [x, y, yaw]");
  }
  return {{number(j[0], path + "[0]"), number(j[1], path + "[1]")},
          number(j[2], path + "[2]")};
}

inline std::vector<Pose2> poses(const json& j, const std::string& path) {
  std::vector<Pose2> out;
  const json& arr = array(j, path);
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(pose(arr[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace json_detail

inline nlohmann::ordered_json to_json(const SimulationOutput& o) {
  using json_detail::ojson;
  ojson sim = ojson::array();
  for (const auto& p : o.simulated_ego_states) {
    sim.push_back(json_detail::to_json(p));
  }
  ojson rec = ojson::array();
  for (const auto& p : o.recorded_ego_states) {
    rec.push_back(json_detail::to_json(p));
  }
  ojson agents = ojson::array();
  for (const auto& frame : o.simulated_agent_states) {
    ojson fj = ojson::array();
    for (const auto& a : frame) fj.push_back(json_detail::to_json(a, false));
    agents.push_back(std::move(fj));
  }
  ojson j = ojson::object();
  j["scene_id"] = o.scene_id;
  j["start_frame"] = o.start_frame;
  j["dt"] = o.dt;
  j["ego_extent"] = ojson::array({o.ego_extent.length, o.ego_extent.width});
  j["simulated_ego_states"] = std::move(sim);
  j["recorded_ego_states"] = std::move(rec);
  j["simulated_agent_states"] = std::move(agents);
  return j;
}

inline SimulationOutput simulation_output_from_json(const nlohmann::json& j,
                                                    const std::string& path) {
  using namespace json_detail;
  SimulationOutput o;
  o.scene_id = string(member(j, "scene_id", path), path + ".scene_id");
  o.start_frame =
      count(member(j, "start_frame", path), path + ".start_frame");
  o.dt = number(member(j, "dt", path), path + ".dt");
  const Vec2 ext = vec2(member(j, "ego_extent", path), path + ".ego_extent");
  o.ego_extent = {ext.x, ext.y};
  o.simulated_ego_states = poses(member(j, "simulated_ego_states", path),
                                 path + ".simulated_ego_states");
  o.recorded_ego_states = poses(member(j, "recorded_ego_states", path),
                                path + ".recorded_ego_states");
  const std::string ap = path + ".simulated_agent_states";
  const json& frames = array(member(j, "simulated_agent_states", path), ap);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string fp = ap + "[" + std::to_string(i) + "]";
    std::vector<AgentRecord> agents;
    const json& arr = array(frames[i], fp);
    for (std::size_t k = 0; k < arr.size(); ++k) {
      agents.push_back(
          agent_record(arr[k], fp + "[" + std::to_string(k) + "]", false));
    }
    o.simulated_agent_states.push_back(std::move(agents));
  }
  o.validate();
  return o;
}

// Rollout file: {"outputs": [SimulationOutput, ...]}.
inline std::string dump_outputs(const std::vector<SimulationOutput>& outputs) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& o : outputs) arr.push_back(to_json(o));
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  j["outputs"] = std::move(arr);
  return j.dump(1) + "\n";
}

inline std::vector<SimulationOutput> parse_outputs(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  const auto& arr =
      json_detail::array(json_detail::member(j, "outputs", "$"), "outputs");
  std::vector<SimulationOutput> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(
        simulation_output_from_json(arr[i], "outputs[" + std::to_string(i) + "]"));
  }
  return out;
}

inline std::vector<SimulationOutput> load_outputs(
    const std::filesystem::path& path) {
  try {
    return parse_outputs(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void save_outputs(const std::vector<SimulationOutput>& outputs,
                         const std::filesystem::path& path) {
  write_text_file(path, dump_outputs(outputs));
}

}  // namespace drivegym
