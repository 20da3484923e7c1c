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
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drivegym/errors.hpp"
#include "drivegym/geometry.hpp"
#include "drivegym/scene.hpp"

namespace drivegym {

struct RasterConfig {
  int width_px = 112;
  int height_px = 112;
  double meters_per_pixel = 0.5;
  // Ego centroid position as fractions of (width, height).
  Vec2 ego_anchor{0.25, 0.5};
  int history_frames = 3;

  // Semantic map (3) plus ego and agent box channels for each of the
  // history_frames + 1 rendered frames.
  int channels() const noexcept { return 3 + 2 * (history_frames + 1); }

  void validate() const {
    if (width_px <= 0 || height_px <= 0) {
      throw ConfigError("raster dimensions must be > 0");
    }
    if (!(meters_per_pixel > 0.0) || !std::isfinite(meters_per_pixel)) {
      throw ConfigError("meters_per_pixel must be > 0");
    }
    if (!(ego_anchor.x >= 0.0 && ego_anchor.x <= 1.0 && ego_anchor.y >= 0.0 &&
          ego_anchor.y <= 1.0)) {
      throw ConfigError("ego_anchor components must lie in [0, 1]");
    }
    if (history_frames < 0) throw ConfigError("history_frames must be >= 0");
  }

  friend bool operator==(const RasterConfig&, const RasterConfig&) = default;
};

// Channel layout.
inline constexpr int kLaneChannel = 0;
inline constexpr int kCrosswalkChannel = 1;
inline constexpr int kTrafficLightChannel = 2;

inline int ego_channel(const RasterConfig&, int slot) noexcept {
  return 3 + slot;
}
inline int agent_channel(const RasterConfig& c, int slot) noexcept {
  return 3 + (c.history_frames + 1) + slot;
}

// Lane tint values in the traffic-light channel.
inline float light_tint(LightColor c) noexcept {
  switch (c) {
    case LightColor::red:
      return 1.0f;
    case LightColor::yellow:
      return 0.75f;
    case LightColor::green:
      return 0.5f;
  }
  return 0.0f;
}

// Channel-major C x H x W tensor with values in [0, 1].
struct Raster {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  Raster() = default;
  Raster(int c, int h, int w)
      : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * h * w, 0.0f) {}

  float& at(int c, int row, int col) {
    return data[(static_cast<std::size_t>(c) * height + row) * width + col];
  }
  float at(int c, int row, int col) const {
    return data[(static_cast<std::size_t>(c) * height + row) * width + col];
  }
  std::span<const float> channel(int c) const {
    const std::size_t n = static_cast<std::size_t>(height) * width;
    return {data.data() + static_cast<std::size_t>(c) * n, n};
  }
  std::size_t count_nonzero(int c) const {
    const auto ch = channel(c);
    return static_cast<std::size_t>(
        std::count_if(ch.begin(), ch.end(), [](float v) { return v != 0.0f; }));
  }

  friend bool operator==(const Raster&, const Raster&) = default;
};

// Fractional pixel coordinates (x = column, y = row) of a world point. The
// ego centroid lands on the anchor, ego heading points along +column and the
// ego's left points toward row 0.
inline Vec2 world_to_raster(const RasterConfig& cfg, const Pose2& ego,
                            Vec2 point) noexcept {
  const Vec2 local = world_to_frame(ego, point);
  const double scale = 1.0 / cfg.meters_per_pixel;
  return {cfg.ego_anchor.x * cfg.width_px + local.x * scale,
          cfg.ego_anchor.y * cfg.height_px - local.y * scale};
}

inline Vec2 raster_to_world(const RasterConfig& cfg, const Pose2& ego,
                            Vec2 pixel) noexcept {
  const Vec2 local{(pixel.x - cfg.ego_anchor.x * cfg.width_px) *
                       cfg.meters_per_pixel,
                   (cfg.ego_anchor.y * cfg.height_px - pixel.y) *
                       cfg.meters_per_pixel};
  return frame_to_world(ego, local);
}

// Semantic map preprocessed for repeated rendering: polygons with bounds,
// and each traffic light bound to its nearest lane.
class RasterMap {
 public:
  struct Polygon {
    std::vector<Vec2> points;
    Vec2 lo;
    Vec2 hi;
  };

  RasterMap() = default;

  explicit RasterMap(const SemanticMap& map) {
    lanes_.reserve(map.lanes.size());
    for (const auto& lane : map.lanes) {
      std::vector<Vec2> pts = lane.left_boundary;
      pts.insert(pts.end(), lane.right_boundary.rbegin(),
                 lane.right_boundary.rend());
      lanes_.push_back(make_polygon(std::move(pts)));
    }
    for (const auto& cw : map.crosswalks) {
      crosswalks_.push_back(make_polygon(cw.polygon));
    }
    for (const auto& tl : map.traffic_lights) {
      lights_.push_back({tl, nearest_lane(tl.position)});
    }
  }

  const std::vector<Polygon>& lanes() const noexcept { return lanes_; }
  const std::vector<Polygon>& crosswalks() const noexcept {
    return crosswalks_;
  }

  struct BoundLight {
    TrafficLight light;
    std::optional<std::size_t> lane;
  };
  const std::vector<BoundLight>& lights() const noexcept { return lights_; }

 private:
  static Polygon make_polygon(std::vector<Vec2> pts) {
    Polygon p{std::move(pts), {}, {}};
    p.lo = {std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    p.hi = -p.lo;
    for (const auto& v : p.points) {
      p.lo = {std::min(p.lo.x, v.x), std::min(p.lo.y, v.y)};
      p.hi = {std::max(p.hi.x, v.x), std::max(p.hi.y, v.y)};
    }
    return p;
  }

  static bool contains(const std::vector<Vec2>& poly, Vec2 q) {
    bool inside = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
      const Vec2 a = poly[i], b = poly[j];
      if ((a.y > q.y) != (b.y > q.y) &&
          q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x) {
        inside = !inside;
      }
    }
    return inside;
  }

  static double segment_distance(Vec2 q, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    const double t =
        len2 > 0.0 ? std::clamp(dot(q - a, ab) / len2, 0.0, 1.0) : 0.0;
    return distance(q, a + t * ab);
  }

  // Ties resolve to the lowest lane index.
  std::optional<std::size_t> nearest_lane(Vec2 q) const {
    std::optional<std::size_t> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lanes_.size(); ++i) {
      const auto& pts = lanes_[i].points;
      double d = 0.0;
      if (!contains(pts, q)) {
        d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < pts.size(); ++k) {
          d = std::min(d, segment_distance(q, pts[k],
                                           pts[(k + 1) % pts.size()]));
        }
      }
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  std::vector<Polygon> lanes_;
  std::vector<Polygon> crosswalks_;
  std::vector<BoundLight> lights_;
};

// World state needed to draw one frame.
struct FrameState {
  AgentRecord ego;
  std::vector<AgentRecord> agents;
};

namespace raster_detail {

struct Bounds {
  Vec2 lo;
  Vec2 hi;
};

// World-space bounding box of the raster footprint.
inline Bounds footprint(const RasterConfig& cfg, const Pose2& ego) {
  const double w = cfg.width_px, h = cfg.height_px;
  Bounds b{{std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()},
           {-std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()}};
  for (Vec2 px : {Vec2{0, 0}, Vec2{w, 0}, Vec2{0, h}, Vec2{w, h}}) {
    const Vec2 p = raster_to_world(cfg, ego, px);
    b.lo = {std::min(b.lo.x, p.x), std::min(b.lo.y, p.y)};
    b.hi = {std::max(b.hi.x, p.x), std::max(b.hi.y, p.y)};
  }
  return b;
}

inline bool overlaps(const Bounds& b, const RasterMap::Polygon& p) {
  return p.lo.x <= b.hi.x && p.hi.x >= b.lo.x && p.lo.y <= b.hi.y &&
         p.hi.y >= b.lo.y;
}

// Even-odd scanline fill; a pixel is set iff its center is inside.
inline void fill_polygon(Raster& r, int channel, const RasterConfig& cfg,
                         const Pose2& ego, const std::vector<Vec2>& world,
                         float value, std::vector<Vec2>& px,
                         std::vector<double>& xs) {
  px.clear();
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -ymin;
  for (const auto& p : world) {
    px.push_back(world_to_raster(cfg, ego, p));
    ymin = std::min(ymin, px.back().y);
    ymax = std::max(ymax, px.back().y);
  }
  const int r0 = std::max(0, static_cast<int>(std::floor(ymin - 0.5)));
  const int r1 =
      std::min(r.height - 1, static_cast<int>(std::ceil(ymax - 0.5)));
  const std::size_t n = px.size();
  for (int row = r0; row <= r1; ++row) {
    const double yc = row + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Vec2 a = px[j], b = px[i];
      if ((a.y <= yc && yc < b.y) || (b.y <= yc && yc < a.y)) {
        xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double c0 = std::max(0.0, std::ceil(xs[k] - 0.5));
      const double c1 = std::min<double>(r.width, std::ceil(xs[k + 1] - 0.5));
      for (int col = static_cast<int>(c0); col < static_cast<int>(c1); ++col) {
        float& v = r.at(channel, row, col);
        v = std::max(v, value);
      }
    }
  }
}

// Sets every pixel whose center lies in the half-open box
// [-L/2, L/2) x [-W/2, W/2) of the box's own frame.
inline void fill_box(Raster& r, int channel, const RasterConfig& cfg,
                     const Pose2& ego, const AgentRecord& box) {
  const Vec2 c = world_to_raster(cfg, ego, box.pose.centroid);
  const double rel = box.pose.yaw - ego.yaw;
  // Pixel-space images of the box axes; rows grow to the ego's right.
  const Vec2 u{std::cos(rel), -std::sin(rel)};
  const Vec2 v{-std::sin(rel), -std::cos(rel)};
  const double hl = 0.5 * box.extent.length / cfg.meters_per_pixel;
  const double hw = 0.5 * box.extent.width / cfg.meters_per_pixel;
  const double rx = hl * std::abs(u.x) + hw * std::abs(v.x);
  const double ry = hl * std::abs(u.y) + hw * std::abs(v.y);
  const int col0 = std::max(0, static_cast<int>(std::floor(c.x - rx - 0.5)));
  const int col1 =
      std::min(r.width - 1, static_cast<int>(std::ceil(c.x + rx - 0.5)));
  const int row0 = std::max(0, static_cast<int>(std::floor(c.y - ry - 0.5)));
  const int row1 =
      std::min(r.height - 1, static_cast<int>(std::ceil(c.y + ry - 0.5)));
  for (int row = row0; row <= row1; ++row) {
    for (int col = col0; col <= col1; ++col) {
      const Vec2 d{col + 0.5 - c.x, row + 0.5 - c.y};
      const double a = dot(d, u);
      const double b = dot(d, v);
      if (a >= -hl && a < hl && b >= -hw && b < hw) {
        r.at(channel, row, col) = 1.0f;
      }
    }
  }
}

}  // namespace raster_detail

// Renders one observation. `history` lists the frames t-H..t oldest first;
// null entries (before scene start) render empty. The last entry must be
// present: its ego pose defines the raster frame. `light_frame` selects
// traffic-light states.
inline Raster render_raster(const RasterMap& map,
                            std::span<const FrameState* const> history,
                            std::size_t light_frame, const RasterConfig& cfg) {
  using namespace raster_detail;
  const int slots = cfg.history_frames + 1;
  if (history.size() != static_cast<std::size_t>(slots) || !history.back()) {
    throw ConfigError("render_raster: history must hold history_frames + 1 "
                      "entries ending with the current frame");
  }
  Raster out(cfg.channels(), cfg.height_px, cfg.width_px);
  const Pose2 ego = history.back()->ego.pose;
  const Bounds fp = footprint(cfg, ego);

  std::vector<Vec2> px_scratch;
  std::vector<double> x_scratch;
  for (const auto& lane : map.lanes()) {
    if (overlaps(fp, lane)) {
      fill_polygon(out, kLaneChannel, cfg, ego, lane.points, 1.0f, px_scratch,
                   x_scratch);
    }
  }
  for (const auto& cw : map.crosswalks()) {
    if (overlaps(fp, cw)) {
      fill_polygon(out, kCrosswalkChannel, cfg, ego, cw.points, 1.0f,
                   px_scratch, x_scratch);
    }
  }
  for (const auto& bound : map.lights()) {
    if (!bound.lane) continue;
    const auto color = bound.light.color_at(light_frame);
    const auto& lane = map.lanes()[*bound.lane];
    if (color && overlaps(fp, lane)) {
      fill_polygon(out, kTrafficLightChannel, cfg, ego, lane.points,
                   light_tint(*color), px_scratch, x_scratch);
    }
  }

  // Boxes are culled by their circumradius against the footprint.
  const auto visible = [&](const AgentRecord& a) {
    const double r = 0.5 * std::hypot(a.extent.length, a.extent.width);
    const Vec2 c = a.pose.centroid;
    return c.x + r >= fp.lo.x && c.x - r <= fp.hi.x && c.y + r >= fp.lo.y &&
           c.y - r <= fp.hi.y;
  };
  for (int slot = 0; slot < slots; ++slot) {
    const FrameState* fs = history[static_cast<std::size_t>(slot)];
    if (!fs) continue;
    if (visible(fs->ego)) fill_box(out, ego_channel(cfg, slot), cfg, ego, fs->ego);
    for (const auto& a : fs->agents) {
      if (visible(a)) fill_box(out, agent_channel(cfg, slot), cfg, ego, a);
    }
  }
  return out;
}

// Observation for logged frame `frame_index`. `ego_trail`, when non-empty,
// supplies simulated ego records ending at frame_index (back() is the current
// frame, the entry before it frame_index - 1, ...); frames it does not cover
// fall back to the log.
inline Raster rasterize(const RasterMap& map, const Scene& scene,
                        std::size_t frame_index, const RasterConfig& cfg,
                        std::span<const AgentRecord> ego_trail = {}) {
  if (frame_index >= scene.size()) {
    throw ConfigError("rasterize: frame " + std::to_string(frame_index) +
                      " out of range for scene '" + scene.scene_id + "' (" +
                      std::to_string(scene.size()) + " frames)");
  }
  cfg.validate();
  const int slots = cfg.history_frames + 1;
  std::vector<FrameState> states(static_cast<std::size_t>(slots));
  std::vector<const FrameState*> history(static_cast<std::size_t>(slots),
                                         nullptr);
  for (int slot = 0; slot < slots; ++slot) {
    const long back = slots - 1 - slot;  // frames before current
    const long f = static_cast<long>(frame_index) - back;
    if (f < 0) continue;
    const Frame& logged = scene.frames[static_cast<std::size_t>(f)];
    FrameState& fs = states[static_cast<std::size_t>(slot)];
    fs.ego = logged.ego;
    if (back < static_cast<long>(ego_trail.size())) {
      fs.ego = ego_trail[ego_trail.size() - 1 - static_cast<std::size_t>(back)];
    }
    fs.agents = logged.agents;
    history[static_cast<std::size_t>(slot)] = &fs;
  }
  return render_raster(map, history, frame_index, cfg);
}

inline Raster rasterize(const SemanticMap& map, const Scene& scene,
                        std::size_t frame_index, const RasterConfig& cfg,
                        std::span<const AgentRecord> ego_trail = {}) {
  return rasterize(RasterMap(map), scene, frame_index, cfg, ego_trail);
}

}  // namespace drivegym
