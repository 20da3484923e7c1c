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
#include <cmath>
#include <type_traits>
#include <variant>

#include "drivegym/errors.hpp"
#include "drivegym/geometry.hpp"
#include "drivegym/types.hpp"

namespace drivegym {

// Ego-frame displacement: dx forward, dy to the left, dyaw counterclockwise.
struct PoseDelta {
  double dx = 0.0;
  double dy = 0.0;
  double dyaw = 0.0;

  friend bool operator==(const PoseDelta&, const PoseDelta&) = default;
};

// Unicycle controls. `steer` is a yaw rate in rad/s, not a wheel angle.
struct KinematicAction {
  double acceleration = 0.0;
  double steer = 0.0;

  friend bool operator==(const KinematicAction&,
                         const KinematicAction&) = default;
};

using Action = std::variant<PoseDelta, KinematicAction>;

inline bool is_finite(const Action& a) {
  return std::visit(
      [](const auto& v) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, PoseDelta>) {
          return std::isfinite(v.dx) && std::isfinite(v.dy) &&
                 std::isfinite(v.dyaw);
        } else {
          return std::isfinite(v.acceleration) && std::isfinite(v.steer);
        }
      },
      a);
}

struct EgoKinematicState {
  Pose2 pose;
  double speed = 0.0;  // m/s, >= 0 unless reverse is allowed

  friend bool operator==(const EgoKinematicState&,
                         const EgoKinematicState&) = default;
};

inline Pose2 apply_pose_delta(const Pose2& pose, const PoseDelta& delta) {
  return {pose.centroid + rotate({delta.dx, delta.dy}, pose.yaw),
          normalize_angle(pose.yaw + delta.dyaw)};
}

// Delta that carries `from` onto `to`.
inline PoseDelta pose_delta_between(const Pose2& from, const Pose2& to) {
  const Vec2 d = world_to_frame(from, to.centroid);
  return {d.x, d.y, normalize_angle(to.yaw - from.yaw)};
}

// Semi-implicit unicycle update: speed and yaw first, then position along
// the new heading.
inline EgoKinematicState unicycle_step(const EgoKinematicState& state,
                                       const KinematicAction& action,
                                       double dt, bool allow_reverse = false) {
  if (!(dt > 0.0)) throw ConfigError("unicycle_step: dt must be > 0");
  double speed = state.speed + action.acceleration * dt;
  if (!allow_reverse) speed = std::max(0.0, speed);
  const double yaw = normalize_angle(state.pose.yaw + action.steer * dt);
  return {{state.pose.centroid + (speed * dt) * heading(yaw), yaw}, speed};
}

}  // namespace drivegym
