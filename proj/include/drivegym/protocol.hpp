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

#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "drivegym/errors.hpp"
#include "drivegym/simulation.hpp"

// Line-delimited control protocol for driving an Environment from another
// process. Each request is one line: a verb optionally followed by a JSON
// object.
//
//   spec                                  -> spaces and dataset size
//   reset {"scene_index": 0}              -> observation
//   step {"action": [dx, dy, dyaw]}       -> observation, reward, done, info
//   step {"action": [acceleration, steer]}   (kinematic action mode)
//   close                                 -> acknowledges and ends the session
//
// Every response is one JSON line with "ok": true, or "ok": false and an
// "error" message; errors do not end the session.

namespace drivegym {

namespace protocol_detail {

using ojson = nlohmann::ordered_json;

inline ojson pose_json(const Pose2& p) {
  ojson j = ojson::object();
  j["centroid"] = ojson::array({p.centroid.x, p.centroid.y});
  j["yaw"] = p.yaw;
  return j;
}

inline ojson raster_json(const Raster& r) {
  ojson j = ojson::object();
  j["shape"] = ojson::array({r.channels, r.height, r.width});
  j["data"] = r.data;
  return j;
}

inline Action parse_action(const nlohmann::json& a, ActionMode mode) {
  const auto num = [](const nlohmann::json& v) {
    if (!v.is_number()) throw ConfigError("action components must be numbers");
    return v.get<double>();
  };
  if (mode == ActionMode::pose_delta) {
    if (a.is_array() && a.size() == 3) {
      return PoseDelta{num(a[0]), num(a[1]), num(a[2])};
    }
    if (a.is_object() && a.contains("dx") && a.contains("dy") &&
        a.contains("dyaw")) {
      return PoseDelta{num(a["dx"]), num(a["dy"]), num(a["dyaw"])};
    }
    throw ConfigError("pose_delta action must be [dx, dy, dyaw]");
  }
  if (a.is_array() && a.size() == 2) {
    return KinematicAction{num(a[0]), num(a[1])};
  }
  if (a.is_object() && a.contains("acceleration") && a.contains("steer")) {
    return KinematicAction{num(a["acceleration"]), num(a["steer"])};
  }
  throw ConfigError("kinematic action must be [acceleration, steer]");
}

inline ojson error(const std::string& what) {
  ojson j = ojson::object();
  j["ok"] = false;
  j["error"] = what;
  return j;
}

}  // namespace protocol_detail

// Handles one request line. Sets `closed` when the session should end.
inline nlohmann::ordered_json handle_request(Environment& env,
                                             const std::string& line,
                                             bool& closed) {
  using namespace protocol_detail;
  const auto space = line.find_first_of(" \t");
  const std::string verb = line.substr(0, space);
  nlohmann::json args = nlohmann::json::object();
  try {
    if (space != std::string::npos &&
        line.find_first_not_of(" \t\r", space) != std::string::npos) {
      args = nlohmann::json::parse(line.substr(space + 1));
    }
  } catch (const nlohmann::json::parse_error& e) {
    return error(std::string("malformed arguments: ") + e.what());
  }

  try {
    ojson r = ojson::object();
    r["ok"] = true;
    if (verb == "close") {
      closed = true;
      r["closed"] = true;
      return r;
    }
    if (verb == "spec") {
      const auto& c = env.config();
      r["observation_shape"] = ojson::array(
          {c.raster.channels(), c.raster.height_px, c.raster.width_px});
      r["action_mode"] = to_string(c.action_mode);
      r["action_size"] = c.action_mode == ActionMode::pose_delta ? 3 : 2;
      r["max_episode_steps"] = c.max_episode_steps;
      r["scene_count"] = env.dataset().scenes.size();
      return r;
    }
    if (verb == "reset") {
      std::size_t scene = 0;
      if (args.contains("scene_index")) {
        if (!args["scene_index"].is_number_unsigned()) {
          return error("scene_index must be a non-negative integer");
        }
        scene = args["scene_index"].get<std::size_t>();
      }
      const Raster obs = env.reset(scene);
      r["observation"] = raster_json(obs);
      r["info"] = ojson::object();
      r["info"]["scene_id"] = env.scene().scene_id;
      r["info"]["frame_index"] = env.frame_index();
      return r;
    }
    if (verb == "step") {
      if (!args.contains("action")) return error("step needs an action");
      const StepResult s =
          env.step(parse_action(args["action"], env.config().action_mode));
      r["observation"] = raster_json(s.observation);
      r["reward"] = s.reward;
      r["done"] = s.done;
      ojson info = ojson::object();
      info["frame_index"] = s.info.frame_index;
      info["ego_pose"] = pose_json(s.info.ego_pose);
      info["recorded_ego_pose"] = pose_json(s.info.recorded_ego_pose);
      info["collision"] = to_string(s.info.collision);
      r["info"] = std::move(info);
      return r;
    }
    return error("unknown request '" + verb + "'");
  } catch (const std::exception& e) {
    return error(e.what());
  }
}

// Serves requests until `close` or end of input.
inline void serve(Environment& env, std::istream& in, std::ostream& out) {
  std::string line;
  bool closed = false;
  while (!closed && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << handle_request(env, line, closed).dump() << '\n';
    out.flush();
  }
}

}  // namespace drivegym
