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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drivegym/errors.hpp"
#include "drivegym/scene.hpp"

namespace drivegym {

namespace json_detail {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

// Typed accessors that report the JSON path of the offending field.
inline const json& member(const json& obj, const char* key,
                          const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(path + "." + key + ": missing field");
  }
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path + ": expected a number");
  return j.get<double>();
}

inline std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ParseError(path + ": expected an integer");
  return j.get<std::int64_t>();
}

inline std::size_t count(const json& j, const std::string& path) {
  const std::int64_t v = integer(j, path);
  if (v < 0) throw ParseError(path + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

inline std::string string(const json& j, const std::string& path) {
  if (j.is_string()) return j.get<std::string>();
  // Ids may be written as integers.
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  throw ParseError(path + ": expected a string");
}

inline const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array");
  return j;
}

inline Vec2 vec2(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) {
    throw ParseError(path + ": expected [x, y]");
  }
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

inline std::vector<Vec2> points(const json& j, const std::string& path) {
  std::vector<Vec2> out;
  const json& arr = array(j, path);
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(vec2(arr[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline ojson to_json(Vec2 v) { return ojson::array({v.x, v.y}); }

inline ojson to_json(const std::vector<Vec2>& pts) {
  ojson arr = ojson::array();
  for (const auto& p : pts) arr.push_back(to_json(p));
  return arr;
}

inline AgentRecord agent_record(const json& j, const std::string& path,
                                bool is_ego) {
  AgentRecord a;
  a.track_id = is_ego ? kEgoTrackId
                      : integer(member(j, "track_id", path), path + ".track_id");
  a.pose.centroid = vec2(member(j, "centroid", path), path + ".centroid");
  a.pose.yaw = number(member(j, "yaw", path), path + ".yaw");
  const Vec2 ext = vec2(member(j, "extent", path), path + ".extent");
  a.extent = {ext.x, ext.y};
  a.velocity = vec2(member(j, "velocity", path), path + ".velocity");
  return a;
}

inline ojson to_json(const AgentRecord& a, bool is_ego) {
  ojson j = ojson::object();
  if (!is_ego) j["track_id"] = a.track_id;
  j["centroid"] = to_json(a.pose.centroid);
  j["yaw"] = a.pose.yaw;
  j["extent"] = ojson::array({a.extent.length, a.extent.width});
  j["velocity"] = to_json(a.velocity);
  return j;
}

inline SemanticMap semantic_map(const json& j, const std::string& path) {
  SemanticMap map;
  const json& lanes = array(member(j, "lanes", path), path + ".lanes");
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const std::string p = path + ".lanes[" + std::to_string(i) + "]";
    map.lanes.push_back(
        {string(member(lanes[i], "id", p), p + ".id"),
         points(member(lanes[i], "left_boundary", p), p + ".left_boundary"),
         points(member(lanes[i], "right_boundary", p), p + ".right_boundary")});
  }
  const json& cws = array(member(j, "crosswalks", path), path + ".crosswalks");
  for (std::size_t i = 0; i < cws.size(); ++i) {
    const std::string p = path + ".crosswalks[" + std::to_string(i) + "]";
    map.crosswalks.push_back({string(member(cws[i], "id", p), p + ".id"),
                              points(member(cws[i], "polygon", p),
                                     p + ".polygon")});
  }
  const json& tls =
      array(member(j, "traffic_lights", path), path + ".traffic_lights");
  for (std::size_t i = 0; i < tls.size(); ++i) {
    const std::string p = path + ".traffic_lights[" + std::to_string(i) + "]";
    TrafficLight tl;
    tl.id = string(member(tls[i], "id", p), p + ".id");
    tl.position = vec2(member(tls[i], "position", p), p + ".position");
    const json& states = array(member(tls[i], "states", p), p + ".states");
    for (std::size_t k = 0; k < states.size(); ++k) {
      const std::string sp = p + ".states[" + std::to_string(k) + "]";
      const std::string name =
          string(member(states[k], "color", sp), sp + ".color");
      const auto color = light_color_from_string(name);
      if (!color) throw ParseError(sp + ".color: unknown color '" + name + "'");
      tl.states.push_back(
          {count(member(states[k], "frame", sp), sp + ".frame"), *color});
    }
    map.traffic_lights.push_back(std::move(tl));
  }
  return map;
}

inline ojson to_json(const SemanticMap& map) {
  ojson lanes = ojson::array();
  for (const auto& l : map.lanes) {
    ojson lj = ojson::object();
    lj["id"] = l.id;
    lj["left_boundary"] = to_json(l.left_boundary);
    lj["right_boundary"] = to_json(l.right_boundary);
    lanes.push_back(std::move(lj));
  }
  ojson cws = ojson::array();
  for (const auto& c : map.crosswalks) {
    ojson cj = ojson::object();
    cj["id"] = c.id;
    cj["polygon"] = to_json(c.polygon);
    cws.push_back(std::move(cj));
  }
  ojson tls = ojson::array();
  for (const auto& t : map.traffic_lights) {
    ojson states = ojson::array();
    for (const auto& s : t.states) {
      ojson sj = ojson::object();
      sj["frame"] = s.frame;
      sj["color"] = to_string(s.color);
      states.push_back(std::move(sj));
    }
    ojson tj = ojson::object();
    tj["id"] = t.id;
    tj["position"] = to_json(t.position);
    tj["states"] = std::move(states);
    tls.push_back(std::move(tj));
  }
  ojson j = ojson::object();
  j["lanes"] = std::move(lanes);
  j["crosswalks"] = std::move(cws);
  j["traffic_lights"] = std::move(tls);
  return j;
}

inline Scene scene(const json& j, const std::string& path) {
  Scene s;
  s.scene_id = string(member(j, "scene_id", path), path + ".scene_id");
  s.dt = number(member(j, "dt", path), path + ".dt");
  const json& frames = array(member(j, "frames", path), path + ".frames");
  s.frames.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string p = path + ".frames[" + std::to_string(i) + "]";
    Frame f;
    f.index = i;
    f.timestamp = number(member(frames[i], "timestamp", p), p + ".timestamp");
    f.ego = agent_record(member(frames[i], "ego", p), p + ".ego", true);
    const json& agents = array(member(frames[i], "agents", p), p + ".agents");
    f.agents.reserve(agents.size());
    for (std::size_t k = 0; k < agents.size(); ++k) {
      f.agents.push_back(agent_record(
          agents[k], p + ".agents[" + std::to_string(k) + "]", false));
    }
    s.frames.push_back(std::move(f));
  }
  return s;
}

inline ojson to_json(const Scene& s) {
  ojson frames = ojson::array();
  for (const auto& f : s.frames) {
    ojson agents = ojson::array();
    for (const auto& a : f.agents) agents.push_back(to_json(a, false));
    ojson fj = ojson::object();
    fj["timestamp"] = f.timestamp;
    fj["ego"] = to_json(f.ego, true);
    fj["agents"] = std::move(agents);
    frames.push_back(std::move(fj));
  }
  ojson j = ojson::object();
  j["scene_id"] = s.scene_id;
  j["dt"] = s.dt;
  j["frames"] = std::move(frames);
  return j;
}

}  // namespace json_detail

inline nlohmann::ordered_json dataset_to_json(const Dataset& d) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  j["format_version"] = d.format_version;
  j["map"] = json_detail::to_json(d.map);
  nlohmann::ordered_json scenes = nlohmann::ordered_json::array();
  for (const auto& s : d.scenes) scenes.push_back(json_detail::to_json(s));
  j["scenes"] = std::move(scenes);
  return j;
}

// Builds and validates a Dataset from parsed JSON.
inline Dataset dataset_from_json(const nlohmann::json& j) {
  using namespace json_detail;
  Dataset d;
  d.format_version =
      static_cast<int>(integer(member(j, "format_version", "$"),
                               "format_version"));
  d.map = semantic_map(member(j, "map", "$"), "map");
  const json& scenes = array(member(j, "scenes", "$"), "scenes");
  d.scenes.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    d.scenes.push_back(scene(scenes[i], "scenes[" + std::to_string(i) + "]"));
  }
  validate(d);
  return d;
}

// Serialized text of `d`; the exact bytes save_dataset writes.
inline std::string dump_dataset(const Dataset& d) {
  return dataset_to_json(d).dump(1) + "\n";
}

inline Dataset parse_dataset(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  return dataset_from_json(j);
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  try {
    return parse_dataset(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void save_dataset(const Dataset& d, const std::filesystem::path& path) {
  validate(d);
  write_text_file(path, dump_dataset(d));
}

}  // namespace drivegym
