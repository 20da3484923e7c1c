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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "drivegym/errors.hpp"
#include "drivegym/scene.hpp"

namespace drivegym {

// Placeholder ego footprint for generated data; not a measured vehicle.
inline constexpr Extent kDefaultEgoExtent{4.87, 1.85};
inline constexpr double kLaneWidth = 3.5;

enum class SceneTemplate { straight, turn, stop_at_light };

inline const char* to_string(SceneTemplate t) {
  switch (t) {
    case SceneTemplate::straight:
      return "straight";
    case SceneTemplate::turn:
      return "turn";
    case SceneTemplate::stop_at_light:
      return "stop";
  }
  return "straight";
}

// mt19937_64 output is fixed by the standard but <random> distributions are
// not, so uniform draws are derived by hand.
class SyntheticRng {
 public:
  explicit SyntheticRng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

// Parameters of one generated scene. Lanes run parallel to the ego lane
// (concentric for turns); lane k sits k lane widths to the ego's left.
struct SceneRecipe {
  struct AgentSlot {
    int lane = 1;         // never 0: agents stay off the ego lane
    double start = 0.0;   // arc length at t = 0, relative to the ego
    double speed = 10.0;  // stop_at_light agents follow the ego profile
    Extent extent{4.5, 1.9};
  };

  SceneTemplate kind = SceneTemplate::straight;
  std::string scene_id = "synthetic";
  Vec2 origin;            // ego centroid at t = 0
  double yaw = 0.0;       // ego heading at t = 0
  double speed = 10.0;    // ego initial speed, m/s
  double radius = 40.0;   // ego lane radius (turn only)
  bool left_turn = true;  // turn only
  std::size_t frames = 50;
  double dt = kDefaultDt;
  Extent ego_extent = kDefaultEgoExtent;
  std::vector<AgentSlot> agents;
};

struct SyntheticScene {
  Scene scene;
  SemanticMap map;
};

namespace synthetic_detail {

struct PathPoint {
  Vec2 position;
  double yaw = 0.0;
};

// Pose at arc length `s` along the path offset `k` lane widths to the left.
// For turns `s` is measured along the offset path itself.
inline PathPoint path_point(const SceneRecipe& r, double s, double k) {
  const Vec2 h = heading(r.yaw);
  const Vec2 left{-h.y, h.x};
  if (r.kind != SceneTemplate::turn) {
    return {r.origin + s * h + (k * kLaneWidth) * left, r.yaw};
  }
  const double sigma = r.left_turn ? 1.0 : -1.0;
  const Vec2 center = r.origin + (sigma * r.radius) * left;
  const double lane_radius = r.radius - sigma * k * kLaneWidth;
  const Vec2 rel = r.origin - center;
  const double theta = std::atan2(rel.y, rel.x) + sigma * s / lane_radius;
  return {center + lane_radius * heading(theta),
          normalize_angle(theta + sigma * std::numbers::pi / 2.0)};
}

inline double lane_radius(const SceneRecipe& r, double k) {
  const double sigma = r.left_turn ? 1.0 : -1.0;
  return r.radius - sigma * k * kLaneWidth;
}

inline std::size_t green_frame(const SceneRecipe& r) {
  const auto g = static_cast<std::size_t>(
      std::llround(0.7 * static_cast<double>(r.frames - 1)));
  return std::max<std::size_t>(g, 1);
}

struct Progress {
  double s = 0.0;  // arc length traveled
  double v = 0.0;  // its rate
};

inline constexpr double kGoAcceleration = 2.0;

// Brake uniformly to rest at 40% of the scene, wait for green, pull away.
inline Progress stop_profile(const SceneRecipe& r, double t) {
  const double duration = static_cast<double>(r.frames - 1) * r.dt;
  const double t_stop = 0.4 * duration;
  const double t_go = static_cast<double>(green_frame(r)) * r.dt;
  const double decel = r.speed / t_stop;
  const double stop_distance = 0.5 * r.speed * t_stop;
  if (t < t_stop) {
    return {r.speed * t - 0.5 * decel * t * t, r.speed - decel * t};
  }
  if (t < t_go) return {stop_distance, 0.0};
  const double tau = t - t_go;
  return {stop_distance + 0.5 * kGoAcceleration * tau * tau,
          kGoAcceleration * tau};
}

inline double stop_line_distance(const SceneRecipe& r) {
  const double duration = static_cast<double>(r.frames - 1) * r.dt;
  return 0.5 * r.speed * 0.4 * duration;
}

inline AgentRecord make_record(std::int64_t track_id, PathPoint p, double v,
                               Extent extent) {
  return {track_id, {p.position, p.yaw}, extent, v * heading(p.yaw)};
}

// Boundary polyline at lateral offset `q` lane widths, sampled by ego-lane
// arc length over [s_lo, s_hi].
inline std::vector<Vec2> boundary(const SceneRecipe& r, double q, double s_lo,
                                  double s_hi) {
  if (r.kind != SceneTemplate::turn) {
    return {path_point(r, s_lo, q).position, path_point(r, s_hi, q).position};
  }
  constexpr double kSpacing = 2.0;
  const auto n = static_cast<std::size_t>(std::ceil((s_hi - s_lo) / kSpacing));
  const double scale = lane_radius(r, q) / r.radius;
  std::vector<Vec2> pts;
  pts.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double s = s_lo + (s_hi - s_lo) * static_cast<double>(i) /
                                static_cast<double>(n);
    pts.push_back(path_point(r, s * scale, q).position);
  }
  return pts;
}

}  // namespace synthetic_detail

// Renders a recipe into a logged scene plus its lanes, crosswalk and light.
// Positions are closed-form functions of time, so per-frame motion is exact
// up to rounding.
inline SyntheticScene make_synthetic_scene(const SceneRecipe& r) {
  using namespace synthetic_detail;
  if (r.frames < 2) throw ConfigError("synthetic scene needs >= 2 frames");
  if (!(r.dt > 0.0)) throw ConfigError("synthetic scene needs dt > 0");

  SyntheticScene out;
  Scene& scene = out.scene;
  scene.scene_id = r.scene_id;
  scene.dt = r.dt;
  scene.frames.reserve(r.frames);

  const bool stopping = r.kind == SceneTemplate::stop_at_light;
  double s_max = 0.0;
  for (std::size_t i = 0; i < r.frames; ++i) {
    const double t = static_cast<double>(i) * r.dt;
    const Progress ego = stopping ? stop_profile(r, t)
                                  : Progress{r.speed * t, r.speed};
    s_max = std::max(s_max, ego.s);

    Frame f;
    f.index = i;
    f.timestamp = t;
    f.ego = make_record(kEgoTrackId, path_point(r, ego.s, 0.0), ego.v,
                        r.ego_extent);
    f.agents.reserve(r.agents.size());
    for (std::size_t j = 0; j < r.agents.size(); ++j) {
      const auto& slot = r.agents[j];
      const Progress p = stopping ? Progress{ego.s + slot.start, ego.v}
                                  : Progress{slot.start + slot.speed * t,
                                             slot.speed};
      f.agents.push_back(make_record(static_cast<std::int64_t>(j + 1),
                                     path_point(r, p.s, slot.lane), p.v,
                                     slot.extent));
    }
    scene.frames.push_back(std::move(f));
  }

  constexpr double kMargin = 60.0;
  double s_lo = -kMargin;
  double s_hi = s_max + kMargin;
  if (r.kind == SceneTemplate::turn) {
    // Keep each lane polygon from wrapping onto itself.
    s_hi = std::min(s_hi, s_lo + 0.95 * 2.0 * std::numbers::pi * r.radius);
  }
  for (int k = -2; k <= 2; ++k) {
    out.map.lanes.push_back(
        {fmt::format("{}/lane_{}", r.scene_id, k),
         boundary(r, k + 0.5, s_lo, s_hi), boundary(r, k - 0.5, s_lo, s_hi)});
  }

  if (stopping) {
    const double line = stop_line_distance(r);
    out.map.crosswalks.push_back(
        {r.scene_id + "/crosswalk",
         {path_point(r, line + 3.0, -2.5).position,
          path_point(r, line + 7.0, -2.5).position,
          path_point(r, line + 7.0, 2.5).position,
          path_point(r, line + 3.0, 2.5).position}});
    out.map.traffic_lights.push_back(
        {r.scene_id + "/light",
         path_point(r, line + 1.0, 0.0).position,
         {{0, LightColor::red}, {green_frame(r), LightColor::green}}});
  }
  return out;
}

// Recipe for the i-th generated scene. Templates cycle straight, turn, stop.
inline SceneRecipe draw_recipe(SyntheticRng& rng, std::size_t index,
                               std::size_t frames, std::size_t n_agents) {
  SceneRecipe r;
  r.kind = static_cast<SceneTemplate>(index % 3);
  r.scene_id = fmt::format("synthetic_{:04}_{}", index, to_string(r.kind));
  // Scenes are spread out so their maps do not overlap at moderate lengths.
  // Coordinates stay well away from zero: near the axes the ulp of a
  // coordinate is finer than any ego-frame delta can resolve, which would
  // rule out bit-exact replay.
  r.origin = {5000.0 + 3000.0 * static_cast<double>(index), 5000.0};
  r.yaw = normalize_angle(rng.uniform(-std::numbers::pi, std::numbers::pi));
  r.speed = rng.uniform(5.0, 15.0);
  r.radius = rng.uniform(35.0, 60.0);
  r.left_turn = rng.coin();
  r.frames = frames;

  constexpr std::array<int, 4> kLanes{1, -1, 2, -2};
  std::array<double, 4> lane_start{};
  std::array<double, 4> lane_speed{};
  for (std::size_t k = 0; k < kLanes.size(); ++k) {
    lane_start[k] = r.kind == SceneTemplate::stop_at_light
                        ? -8.0 - rng.uniform(0.0, 10.0)
                        : rng.uniform(-20.0, 5.0);
    lane_speed[k] = rng.uniform(std::max(0.0, r.speed - 2.0), r.speed + 2.0);
  }
  // Agents sharing a lane share its speed and keep a 12 m spacing.
  constexpr double kSpacing = 12.0;
  for (std::size_t j = 0; j < n_agents; ++j) {
    const std::size_t k = j % kLanes.size();
    const double slot = static_cast<double>(j / kLanes.size());
    r.agents.push_back({kLanes[k], lane_start[k] - kSpacing * slot,
                        lane_speed[k],
                        {rng.uniform(4.0, 5.2), rng.uniform(1.7, 2.1)}});
  }
  return r;
}

// Deterministic desk-scale dataset: a pure function of its arguments.
inline Dataset generate_synthetic(std::uint64_t seed, std::size_t n_scenes,
                                  std::size_t frames_per_scene,
                                  std::size_t n_agents) {
  if (n_scenes < 1) throw ConfigError("n_scenes must be >= 1");
  if (frames_per_scene < 2) throw ConfigError("frames_per_scene must be >= 2");
  SyntheticRng rng(seed);
  Dataset d;
  d.scenes.reserve(n_scenes);
  for (std::size_t i = 0; i < n_scenes; ++i) {
    SyntheticScene s =
        make_synthetic_scene(draw_recipe(rng, i, frames_per_scene, n_agents));
    d.scenes.push_back(std::move(s.scene));
    auto& m = d.map;
    m.lanes.insert(m.lanes.end(), s.map.lanes.begin(), s.map.lanes.end());
    m.crosswalks.insert(m.crosswalks.end(), s.map.crosswalks.begin(),
                        s.map.crosswalks.end());
    m.traffic_lights.insert(m.traffic_lights.end(),
                            s.map.traffic_lights.begin(),
                            s.map.traffic_lights.end());
  }
  validate(d);
  return d;
}

}  // namespace drivegym
