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
#include <numbers>

namespace drivegym {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) noexcept {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) noexcept {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return a -= b; }
  friend constexpr Vec2 operator-(Vec2 a) noexcept { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) noexcept {
    return {s * a.x, s * a.y};
  }
  friend constexpr Vec2 operator*(Vec2 a, double s) noexcept { return s * a; }
  friend constexpr bool operator==(Vec2, Vec2) noexcept = default;
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) noexcept {
  return a.x * b.y - a.y * b.x;
}
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) noexcept { return norm(a - b); }
inline bool is_finite(Vec2 a) noexcept {
  return std::isfinite(a.x) && std::isfinite(a.y);
}

// Wraps an angle into (-pi, pi].
inline double normalize_angle(double angle) noexcept {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::remainder(angle, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

inline bool is_normalized_angle(double angle) noexcept {
  return angle > -std::numbers::pi && angle <= std::numbers::pi;
}

// Unit vector along `yaw`.
inline Vec2 heading(double yaw) noexcept {
  return {std::cos(yaw), std::sin(yaw)};
}

// Counterclockwise rotation of `v` by `angle`.
inline Vec2 rotate(Vec2 v, double angle) noexcept {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

// Planar pose: centroid in meters (world frame), yaw in radians measured
// counterclockwise from +x, kept in (-pi, pi].
struct Pose2 {
  Vec2 centroid;
  double yaw = 0.0;

  friend constexpr bool operator==(const Pose2&, const Pose2&) noexcept =
      default;
};

// Length along the heading axis, width across it. Both in meters.
struct Extent {
  double length = 0.0;
  double width = 0.0;

  friend constexpr bool operator==(const Extent&, const Extent&) noexcept =
      default;
};

}  // namespace drivegym
