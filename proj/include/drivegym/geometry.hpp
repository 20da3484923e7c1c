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

#include <array>
#include <cmath>
#include <numbers>
#include <string_view>

#include "drivegym/scene.hpp"
#include "drivegym/types.hpp"

namespace drivegym {

// Expresses world-frame `point` in the frame whose origin and orientation are
// given by `pose`.
inline Vec2 world_to_frame(const Pose2& pose, Vec2 point) noexcept {
  return rotate(point - pose.centroid, -pose.yaw);
}

inline Vec2 frame_to_world(const Pose2& pose, Vec2 point) noexcept {
  return pose.centroid + rotate(point, pose.yaw);
}

// Pose `local` (expressed in `base`'s frame) mapped into the world frame.
inline Pose2 compose(const Pose2& base, const Pose2& local) noexcept {
  return {frame_to_world(base, local.centroid),
          normalize_angle(base.yaw + local.yaw)};
}

inline Pose2 inverse(const Pose2& p) noexcept {
  return {rotate(-p.centroid, -p.yaw), normalize_angle(-p.yaw)};
}

struct OrientedBox {
  Pose2 pose;
  Extent extent;  // length along the heading axis

  static OrientedBox of(const AgentRecord& a) { return {a.pose, a.extent}; }

  // Corners counterclockwise starting front-left.
  std::array<Vec2, 4> corners() const {
    const Vec2 u = 0.5 * extent.length * heading(pose.yaw);
    const Vec2 v = 0.5 * extent.width * heading(pose.yaw + std::numbers::pi / 2);
    const Vec2 c = pose.centroid;
    return {c + u + v, c - u + v, c - u - v, c + u - v};
  }
};

// Closed-rectangle overlap by the separating-axis test over both boxes' edge
// normals. Touching boxes intersect.
inline bool obb_intersects(const OrientedBox& a, const OrientedBox& b) noexcept {
  const Vec2 d = b.pose.centroid - a.pose.centroid;
  const Vec2 au = heading(a.pose.yaw);
  const Vec2 av{-au.y, au.x};
  const Vec2 bu = heading(b.pose.yaw);
  const Vec2 bv{-bu.y, bu.x};
  const double ahl = 0.5 * a.extent.length, ahw = 0.5 * a.extent.width;
  const double bhl = 0.5 * b.extent.length, bhw = 0.5 * b.extent.width;

  const auto separated = [&](Vec2 axis) {
    const double ra = ahl * std::abs(dot(au, axis)) + ahw * std::abs(dot(av, axis));
    const double rb = bhl * std::abs(dot(bu, axis)) + bhw * std::abs(dot(bv, axis));
    return std::abs(dot(d, axis)) > ra + rb;
  };
  return !(separated(au) || separated(av) || separated(bu) || separated(bv));
}

enum class CollisionType { none, front, side, rear };

inline std::string_view to_string(CollisionType c) {
  switch (c) {
    case CollisionType::none:
      return "none";
    case CollisionType::front:
      return "front";
    case CollisionType::side:
      return "side";
    case CollisionType::rear:
      return "rear";
  }
  return "none";
}

// Sector of a bearing in (-pi, pi]: front within pi/4 of dead ahead, rear
// within pi/4 of dead astern, side otherwise. Boundaries go to front/rear.
inline CollisionType bearing_sector(double bearing) noexcept {
  const double a = std::abs(normalize_angle(bearing));
  if (a <= std::numbers::pi / 4) return CollisionType::front;
  if (a >= 3 * std::numbers::pi / 4) return CollisionType::rear;
  return CollisionType::side;
}

// `none` when the boxes are disjoint, otherwise the sector of the agent
// centroid's bearing in the ego frame.
inline CollisionType classify_collision(const OrientedBox& ego,
                                        const OrientedBox& agent) noexcept {
  if (!obb_intersects(ego, agent)) return CollisionType::none;
  const Vec2 rel = world_to_frame(ego.pose, agent.pose.centroid);
  return bearing_sector(std::atan2(rel.y, rel.x));
}

}  // namespace drivegym
