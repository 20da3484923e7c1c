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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "drivegym/errors.hpp"
#include "drivegym/types.hpp"

namespace drivegym {

inline constexpr std::int64_t kEgoTrackId = 0;
inline constexpr int kFormatVersion = 1;
inline constexpr double kDefaultDt = 0.1;
// Tolerance on |timestamp[i+1] - timestamp[i] - dt|.
inline constexpr double kTimestampTolerance = 1e-6;

struct AgentRecord {
  std::int64_t track_id = kEgoTrackId;
  Pose2 pose;
  Extent extent;
  Vec2 velocity;

  friend bool operator==(const AgentRecord&, const AgentRecord&) = default;
};

struct Frame {
  std::size_t index = 0;
  double timestamp = 0.0;
  AgentRecord ego;
  std::vector<AgentRecord> agents;

  // Logged agent with `track_id`, if present in this frame.
  const AgentRecord* find_agent(std::int64_t track_id) const {
    for (const auto& a : agents) {
      if (a.track_id == track_id) return &a;
    }
    return nullptr;
  }

  friend bool operator==(const Frame&, const Frame&) = default;
};

struct Scene {
  std::string scene_id;
  double dt = kDefaultDt;
  std::vector<Frame> frames;

  std::size_t size() const noexcept { return frames.size(); }

  friend bool operator==(const Scene&, const Scene&) = default;
};

enum class LightColor { red, yellow, green };

inline std::string_view to_string(LightColor c) {
  switch (c) {
    case LightColor::red:
      return "red";
    case LightColor::yellow:
      return "yellow";
    case LightColor::green:
      return "green";
  }
  return "red";
}

inline std::optional<LightColor> light_color_from_string(std::string_view s) {
  if (s == "red") return LightColor::red;
  if (s == "yellow") return LightColor::yellow;
  if (s == "green") return LightColor::green;
  return std::nullopt;
}

struct Lane {
  std::string id;
  std::vector<Vec2> left_boundary;
  std::vector<Vec2> right_boundary;

  friend bool operator==(const Lane&, const Lane&) = default;
};

struct Crosswalk {
  std::string id;
  std::vector<Vec2> polygon;

  friend bool operator==(const Crosswalk&, const Crosswalk&) = default;
};

struct LightState {
  std::size_t frame = 0;
  LightColor color = LightColor::red;

  friend bool operator==(const LightState&, const LightState&) = default;
};

struct TrafficLight {
  std::string id;
  Vec2 position;
  // Piecewise-constant color: a state holds from its frame until the next.
  std::vector<LightState> states;

  // Color in effect at `frame`; nothing before the first state.
  std::optional<LightColor> color_at(std::size_t frame) const {
    std::optional<LightColor> color;
    for (const auto& s : states) {
      if (s.frame > frame) break;
      color = s.color;
    }
    return color;
  }

  friend bool operator==(const TrafficLight&, const TrafficLight&) = default;
};

struct SemanticMap {
  std::vector<Lane> lanes;
  std::vector<Crosswalk> crosswalks;
  std::vector<TrafficLight> traffic_lights;

  bool empty() const noexcept {
    return lanes.empty() && crosswalks.empty() && traffic_lights.empty();
  }

  friend bool operator==(const SemanticMap&, const SemanticMap&) = default;
};

struct Dataset {
  int format_version = kFormatVersion;
  SemanticMap map;
  std::vector<Scene> scenes;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

namespace detail {

inline std::string indexed(std::string_view base, std::size_t i) {
  return std::string(base) + "[" + std::to_string(i) + "]";
}

inline void require(bool ok, const std::string& field, const char* what) {
  if (!ok) throw ValidationError(field, what);
}

inline void validate_points(const std::vector<Vec2>& pts, std::size_t min_size,
                            const std::string& field) {
  if (pts.size() < min_size) {
    throw ValidationError(field, "needs at least " + std::to_string(min_size) +
                                     " points, got " +
                                     std::to_string(pts.size()));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    require(is_finite(pts[i]), indexed(field, i), "non-finite coordinate");
  }
}

}  // namespace detail

// Checks every AgentRecord invariant. `field` prefixes error loci.
inline void validate(const AgentRecord& a, const std::string& field) {
  using detail::require;
  require(is_finite(a.pose.centroid), field + ".centroid",
          "non-finite coordinate");
  require(std::isfinite(a.pose.yaw), field + ".yaw", "non-finite yaw");
  require(is_normalized_angle(a.pose.yaw), field + ".yaw",
          "yaw outside (-pi, pi]");
  require(std::isfinite(a.extent.length) && a.extent.length > 0.0,
          field + ".extent", "length must be > 0");
  require(std::isfinite(a.extent.width) && a.extent.width > 0.0,
          field + ".extent", "width must be > 0");
  require(is_finite(a.velocity), field + ".velocity", "non-finite velocity");
}

inline void validate(const Scene& scene, const std::string& field) {
  using detail::indexed;
  using detail::require;
  require(!scene.scene_id.empty(), field + ".scene_id", "empty scene_id");
  const std::string at = field + "(" + scene.scene_id + ")";
  require(std::isfinite(scene.dt) && scene.dt > 0.0, at + ".dt",
          "dt must be > 0");
  require(scene.frames.size() >= 2, at + ".frames",
          "a scene needs at least 2 frames");
  for (std::size_t i = 0; i < scene.frames.size(); ++i) {
    const Frame& f = scene.frames[i];
    const std::string ff = indexed(at + ".frames", i);
    require(f.index == i, ff + ".index", "frame index out of sequence");
    require(std::isfinite(f.timestamp), ff + ".timestamp",
            "non-finite timestamp");
    if (i > 0) {
      const double step = f.timestamp - scene.frames[i - 1].timestamp;
      require(step > 0.0, ff + ".timestamp",
              "timestamps must be strictly increasing");
      require(std::abs(step - scene.dt) <= kTimestampTolerance,
              ff + ".timestamp", "timestamp step differs from dt");
    }
    require(f.ego.track_id == kEgoTrackId, ff + ".ego.track_id",
            "ego must use the reserved track id 0");
    validate(f.ego, ff + ".ego");
    std::unordered_set<std::int64_t> seen;
    for (std::size_t j = 0; j < f.agents.size(); ++j) {
      const AgentRecord& a = f.agents[j];
      const std::string af = indexed(ff + ".agents", j);
      require(a.track_id > 0, af + ".track_id", "track_id must be positive");
      require(seen.insert(a.track_id).second, af + ".track_id",
              "duplicate track_id within frame");
      validate(a, af);
    }
  }
}

inline void validate(const SemanticMap& map, const std::string& field) {
  using detail::indexed;
  using detail::require;
  using detail::validate_points;
  for (std::size_t i = 0; i < map.lanes.size(); ++i) {
    const std::string lf = indexed(field + ".lanes", i);
    validate_points(map.lanes[i].left_boundary, 2, lf + ".left_boundary");
    validate_points(map.lanes[i].right_boundary, 2, lf + ".right_boundary");
  }
  for (std::size_t i = 0; i < map.crosswalks.size(); ++i) {
    validate_points(map.crosswalks[i].polygon, 3,
                    indexed(field + ".crosswalks", i) + ".polygon");
  }
  for (std::size_t i = 0; i < map.traffic_lights.size(); ++i) {
    const TrafficLight& tl = map.traffic_lights[i];
    const std::string tf = indexed(field + ".traffic_lights", i);
    require(is_finite(tl.position), tf + ".position", "non-finite coordinate");
    for (std::size_t j = 1; j < tl.states.size(); ++j) {
      require(tl.states[j].frame >= tl.states[j - 1].frame,
              indexed(tf + ".states", j) + ".frame",
              "state frames must be nondecreasing");
    }
  }
}

// Throws ValidationError naming the first violated invariant. Never repairs.
inline void validate(const Dataset& d) {
  detail::require(d.format_version == kFormatVersion, "format_version",
                  "unsupported format_version (expected 1)");
  validate(d.map, "map");
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < d.scenes.size(); ++i) {
    const std::string sf = detail::indexed("scenes", i);
    validate(d.scenes[i], sf);
    detail::require(ids.insert(d.scenes[i].scene_id).second,
                    sf + ".scene_id", "duplicate scene_id");
  }
}

}  // namespace drivegym
