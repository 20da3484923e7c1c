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

#include <filesystem>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "drivegym/cle.hpp"
#include "drivegym/errors.hpp"
#include "drivegym/scene_io.hpp"
#include "drivegym/simulation.hpp"

namespace drivegym {

namespace config_detail {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

inline void reject_unknown(const json& obj, std::set<std::string> known,
                           const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) {
      throw ConfigError(path + "." + key + ": unknown field");
    }
  }
}

inline const json* optional(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline bool boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path + ": expected true or false");
  return j.get<bool>();
}

// json_detail accessors raise ParseError; configuration problems surface as
// ConfigError.
template <typename Fn>
auto as_config(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

inline Comparison comparison(const std::string& s, const std::string& path) {
  if (s == "ge") return Comparison::ge;
  if (s == "le") return Comparison::le;
  throw ConfigError(path + ": op must be \"ge\" or \"le\", got '" + s + "'");
}

inline ValidatorScope scope(const std::string& s, const std::string& path) {
  if (s == "any_frame") return ValidatorScope::any_frame;
  if (s == "final_frame") return ValidatorScope::final_frame;
  if (s == "scene_mean" || s == "scene_aggregate") {
    return ValidatorScope::scene_mean;
  }
  throw ConfigError(path + ": unknown scope '" + s + "'");
}

}  // namespace config_detail

// ---------------------------------------------------------------------------
// Environment configuration. Every field is optional; omitted fields keep
// their defaults.

inline RewardSpec reward_spec_from_json(const nlohmann::json& j,
                                        const std::string& path) {
  using namespace config_detail;
  return as_config([&] {
    reject_unknown(j, {"components"}, path);
    RewardSpec spec;
    const json& comps = json_detail::array(
        json_detail::member(j, "components", path), path + ".components");
    for (std::size_t i = 0; i < comps.size(); ++i) {
      const std::string p = path + ".components[" + std::to_string(i) + "]";
      reject_unknown(comps[i], {"metric", "weight", "clip"}, p);
      RewardComponent c;
      c.metric = json_detail::string(json_detail::member(comps[i], "metric", p),
                                     p + ".metric");
      if (const json* w = optional(comps[i], "weight")) {
        c.weight = json_detail::number(*w, p + ".weight");
      }
      if (const json* cl = optional(comps[i], "clip"); cl && !cl->is_null()) {
        c.clip = json_detail::number(*cl, p + ".clip");
      }
      spec.components.push_back(std::move(c));
    }
    return spec;
  });
}

inline nlohmann::ordered_json to_json(const RewardSpec& spec) {
  config_detail::ojson comps = config_detail::ojson::array();
  for (const auto& c : spec.components) {
    config_detail::ojson cj = config_detail::ojson::object();
    cj["metric"] = c.metric;
    cj["weight"] = c.weight;
    cj["clip"] = c.clip ? config_detail::ojson(*c.clip) : config_detail::ojson();
    comps.push_back(std::move(cj));
  }
  config_detail::ojson j = config_detail::ojson::object();
  j["components"] = std::move(comps);
  return j;
}

inline EnvConfig env_config_from_json(const nlohmann::json& j) {
  using namespace config_detail;
  return as_config([&] {
    const std::string root = "config";
    if (!j.is_object()) throw ConfigError(root + ": expected an object");
    reject_unknown(j,
                   {"raster", "action_mode", "max_episode_steps", "agent_mode",
                    "start_frame_policy", "reward", "terminate_on_collision",
                    "allow_reverse", "reactive_radius"},
                   root);
    EnvConfig c;
    if (const json* r = optional(j, "raster")) {
      const std::string p = root + ".raster";
      reject_unknown(*r,
                     {"width_px", "height_px", "meters_per_pixel", "ego_anchor",
                      "history_frames"},
                     p);
      if (const json* v = optional(*r, "width_px")) {
        c.raster.width_px =
            static_cast<int>(json_detail::integer(*v, p + ".width_px"));
      }
      if (const json* v = optional(*r, "height_px")) {
        c.raster.height_px =
            static_cast<int>(json_detail::integer(*v, p + ".height_px"));
      }
      if (const json* v = optional(*r, "meters_per_pixel")) {
        c.raster.meters_per_pixel =
            json_detail::number(*v, p + ".meters_per_pixel");
      }
      if (const json* v = optional(*r, "ego_anchor")) {
        c.raster.ego_anchor = json_detail::vec2(*v, p + ".ego_anchor");
      }
      if (const json* v = optional(*r, "history_frames")) {
        c.raster.history_frames =
            static_cast<int>(json_detail::integer(*v, p + ".history_frames"));
      }
    }
    if (const json* v = optional(j, "action_mode")) {
      const auto s = json_detail::string(*v, root + ".action_mode");
      if (s == "pose_delta") {
        c.action_mode = ActionMode::pose_delta;
      } else if (s == "kinematic") {
        c.action_mode = ActionMode::kinematic;
      } else {
        throw ConfigError(root + ".action_mode: unknown mode '" + s + "'");
      }
    }
    if (const json* v = optional(j, "max_episode_steps")) {
      c.max_episode_steps =
          json_detail::count(*v, root + ".max_episode_steps");
    }
    if (const json* v = optional(j, "agent_mode")) {
      const auto s = json_detail::string(*v, root + ".agent_mode");
      if (s == "log_replay") {
        c.agent_mode = AgentMode::log_replay;
      } else if (s == "reactive") {
        c.agent_mode = AgentMode::reactive;
      } else {
        throw ConfigError(root + ".agent_mode: unknown mode '" + s + "'");
      }
    }
    if (const json* v = optional(j, "start_frame_policy")) {
      const std::string p = root + ".start_frame_policy";
      if (!v->is_object() || v->size() != 1) {
        throw ConfigError(p + ": expected {\"fixed\": index} or "
                              "{\"random\": seed}");
      }
      if (const json* f = optional(*v, "fixed")) {
        c.start_frame = StartFramePolicy::fixed(json_detail::count(*f, p));
      } else if (const json* s = optional(*v, "random")) {
        c.start_frame = StartFramePolicy::random(json_detail::count(*s, p));
      } else {
        throw ConfigError(p + ": expected \"fixed\" or \"random\"");
      }
    }
    if (const json* v = optional(j, "reward")) {
      c.reward = reward_spec_from_json(*v, root + ".reward");
    }
    if (const json* v = optional(j, "terminate_on_collision")) {
      c.terminate_on_collision =
          boolean(*v, root + ".terminate_on_collision");
    }
    if (const json* v = optional(j, "allow_reverse")) {
      c.allow_reverse = boolean(*v, root + ".allow_reverse");
    }
    if (const json* v = optional(j, "reactive_radius")) {
      c.reactive_radius = json_detail::number(*v, root + ".reactive_radius");
    }
    return c;
  });
}

inline nlohmann::ordered_json to_json(const EnvConfig& c) {
  using config_detail::ojson;
  ojson raster = ojson::object();
  raster["width_px"] = c.raster.width_px;
  raster["height_px"] = c.raster.height_px;
  raster["meters_per_pixel"] = c.raster.meters_per_pixel;
  raster["ego_anchor"] = ojson::array({c.raster.ego_anchor.x,
                                       c.raster.ego_anchor.y});
  raster["history_frames"] = c.raster.history_frames;
  ojson start = ojson::object();
  if (c.start_frame.kind == StartFramePolicy::Kind::fixed) {
    start["fixed"] = c.start_frame.index;
  } else {
    start["random"] = c.start_frame.seed;
  }
  ojson j = ojson::object();
  j["raster"] = std::move(raster);
  j["action_mode"] = to_string(c.action_mode);
  j["max_episode_steps"] = c.max_episode_steps;
  j["agent_mode"] = to_string(c.agent_mode);
  j["start_frame_policy"] = std::move(start);
  j["reward"] = to_json(c.reward);
  j["terminate_on_collision"] = c.terminate_on_collision;
  j["allow_reverse"] = c.allow_reverse;
  j["reactive_radius"] = c.reactive_radius;
  return j;
}

inline EnvConfig load_env_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return env_config_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Evaluation plans.

inline EvaluationPlan plan_from_json(const nlohmann::json& j) {
  using namespace config_detail;
  return as_config([&] {
    const std::string root = "plan";
    if (!j.is_object()) throw ConfigError(root + ": expected an object");
    reject_unknown(j, {"metrics", "validators", "composites"}, root);
    EvaluationPlan plan;
    const json& metrics = json_detail::array(
        json_detail::member(j, "metrics", root), root + ".metrics");
    for (std::size_t i = 0; i < metrics.size(); ++i) {
      plan.metrics.push_back(json_detail::string(
          metrics[i], root + ".metrics[" + std::to_string(i) + "]"));
    }
    if (const json* vs = optional(j, "validators")) {
      json_detail::array(*vs, root + ".validators");
      for (std::size_t i = 0; i < vs->size(); ++i) {
        const json& v = (*vs)[i];
        const std::string p = root + ".validators[" + std::to_string(i) + "]";
        reject_unknown(v, {"name", "metric", "op", "threshold", "scope"}, p);
        Validator val;
        val.name = json_detail::string(json_detail::member(v, "name", p),
                                       p + ".name");
        val.metric = json_detail::string(json_detail::member(v, "metric", p),
                                         p + ".metric");
        val.comparison = comparison(
            json_detail::string(json_detail::member(v, "op", p), p + ".op"),
            p + ".op");
        val.threshold = json_detail::number(
            json_detail::member(v, "threshold", p), p + ".threshold");
        val.scope = scope(json_detail::string(json_detail::member(v, "scope", p),
                                              p + ".scope"),
                          p + ".scope");
        plan.validators.push_back(std::move(val));
      }
    }
    if (const json* cs = optional(j, "composites")) {
      json_detail::array(*cs, root + ".composites");
      for (std::size_t i = 0; i < cs->size(); ++i) {
        plan.composites.push_back(json_detail::string(
            (*cs)[i], root + ".composites[" + std::to_string(i) + "]"));
      }
    }
    return plan;
  });
}

inline nlohmann::ordered_json to_json(const Validator& v) {
  config_detail::ojson j = config_detail::ojson::object();
  j["name"] = v.name;
  j["metric"] = v.metric;
  j["op"] = to_string(v.comparison);
  j["threshold"] = v.threshold;
  j["scope"] = to_string(v.scope);
  return j;
}

inline nlohmann::ordered_json to_json(const EvaluationPlan& plan) {
  using config_detail::ojson;
  ojson validators = ojson::array();
  for (const auto& v : plan.validators) validators.push_back(to_json(v));
  ojson j = ojson::object();
  j["metrics"] = plan.metrics;
  j["validators"] = std::move(validators);
  j["composites"] = plan.composites;
  return j;
}

inline EvaluationPlan load_plan(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return plan_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace drivegym
