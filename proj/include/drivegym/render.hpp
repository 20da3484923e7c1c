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
#include <limits>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "drivegym/errors.hpp"
#include "drivegym/geometry.hpp"
#include "drivegym/scene.hpp"
#include "drivegym/simulation_output.hpp"

namespace drivegym {

struct RenderOptions {
  double prediction_scale = 10.0;
  double marker_interval = 2.0;  // seconds
  double margin = 30.0;          // meters around the ego trajectories
};

// Rollout-relative frame indices of the prediction markers: one every
// `interval` seconds starting at the first frame.
inline std::vector<std::size_t> marker_frames(std::size_t frames, double dt,
                                              double interval) {
  if (!(interval > 0.0) || !(dt > 0.0)) {
    throw ConfigError("marker interval and dt must be > 0");
  }
  std::vector<std::size_t> out;
  for (std::size_t m = 0;; ++m) {
    const double k = std::round(static_cast<double>(m) * interval / dt);
    if (k >= static_cast<double>(frames)) break;
    out.push_back(static_cast<std::size_t>(k));
  }
  return out;
}

namespace svg_detail {

inline std::string points(const std::vector<Vec2>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) s += ' ';
    s += fmt::format("{},{}", pts[i].x, pts[i].y);
  }
  return s;
}

inline std::vector<Vec2> centroids(const std::vector<Pose2>& poses) {
  std::vector<Vec2> out;
  out.reserve(poses.size());
  for (const auto& p : poses) out.push_back(p.centroid);
  return out;
}

inline std::vector<Vec2> box_points(const OrientedBox& b) {
  const auto c = b.corners();
  return {c.begin(), c.end()};
}

}  // namespace svg_detail

// Static rollout picture in world coordinates (y flipped for display): map
// features near the trajectory, agent and ego boxes at marker frames, the
// recorded and simulated ego paths, and the policy's next-step displacement
// at each marker scaled by `prediction_scale`.
inline std::string render_svg(const SimulationOutput& out,
                              const SemanticMap* map,
                              const RenderOptions& opt = {}) {
  using namespace svg_detail;
  if (out.size() == 0) throw ConfigError("cannot render an empty rollout");
  if (!std::isfinite(opt.prediction_scale)) {
    throw ConfigError("prediction scale must be finite");
  }
  const auto sim = centroids(out.simulated_ego_states);
  const auto rec = centroids(out.recorded_ego_states);

  Vec2 lo{std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec2 hi = -lo;
  for (const auto* pts : {&sim, &rec}) {
    for (const auto& p : *pts) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
  }
  lo -= Vec2{opt.margin, opt.margin};
  hi += Vec2{opt.margin, opt.margin};
  // Segment bounding boxes, so long sparse polylines crossing the view count.
  const auto in_view = [&](const std::vector<Vec2>& pts) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec2 a = pts[i];
      const Vec2 b = pts[i + 1 < pts.size() ? i + 1 : i];
      if (std::max(a.x, b.x) >= lo.x && std::min(a.x, b.x) <= hi.x &&
          std::max(a.y, b.y) >= lo.y && std::min(a.y, b.y) <= hi.y) {
        return true;
      }
    }
    return false;
  };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" "
      "width=\"800\" height=\"{}\">\n",
      lo.x, -hi.y, hi.x - lo.x, hi.y - lo.y,
      std::llround(800.0 * (hi.y - lo.y) / (hi.x - lo.x)));
  s += fmt::format("<title>{} rollout from frame {}</title>\n", out.scene_id,
                   out.start_frame);
  s += "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"0.3\">\n";

  if (map) {
    s += "<g id=\"map\" stroke=\"#999999\">\n";
    for (const auto& lane : map->lanes) {
      if (!in_view(lane.left_boundary) && !in_view(lane.right_boundary)) {
        continue;
      }
      s += fmt::format("<polyline class=\"lane\" points=\"{}\"/>\n",
                       points(lane.left_boundary));
      s += fmt::format("<polyline class=\"lane\" points=\"{}\"/>\n",
                       points(lane.right_boundary));
    }
    for (const auto& cw : map->crosswalks) {
      if (!in_view(cw.polygon)) continue;
      s += fmt::format(
          "<polygon class=\"crosswalk\" fill=\"#dddddd\" points=\"{}\"/>\n",
          points(cw.polygon));
    }
    for (const auto& tl : map->traffic_lights) {
      if (!in_view({tl.position})) continue;
      s += fmt::format(
          "<circle class=\"traffic-light\" cx=\"{}\" cy=\"{}\" r=\"1\"/>\n",
          tl.position.x, tl.position.y);
    }
    s += "</g>\n";
  }

  const auto markers = marker_frames(out.size(), out.dt, opt.marker_interval);
  s += "<g id=\"agents\" stroke=\"#1f5fbf\">\n";
  for (std::size_t k : markers) {
    for (const auto& a : out.simulated_agent_states[k]) {
      s += fmt::format(
          "<polygon class=\"agent\" data-frame=\"{}\" data-track=\"{}\" "
          "points=\"{}\"/>\n",
          k, a.track_id, points(box_points(OrientedBox::of(a))));
    }
  }
  s += "</g>\n<g id=\"ego\" stroke=\"#d62728\">\n";
  for (std::size_t k : markers) {
    s += fmt::format(
        "<polygon class=\"ego\" data-frame=\"{}\" points=\"{}\"/>\n", k,
        points(box_points({out.simulated_ego_states[k], out.ego_extent})));
  }
  s += "</g>\n";
  s += fmt::format(
      "<polyline id=\"recorded_ego\" stroke=\"#7f7f7f\" "
      "stroke-dasharray=\"1,1\" points=\"{}\"/>\n",
      points(rec));
  s += fmt::format(
      "<polyline id=\"simulated_ego\" stroke=\"#d62728\" points=\"{}\"/>\n",
      points(sim));
  s += "<g id=\"predictions\" stroke=\"#2ca02c\">\n";
  for (std::size_t k : markers) {
    const Vec2 p = sim[k];
    const Vec2 step = k + 1 < sim.size() ? sim[k + 1] - p : Vec2{};
    const Vec2 q = p + opt.prediction_scale * step;
    s += fmt::format(
        "<line class=\"prediction\" data-frame=\"{}\" x1=\"{}\" y1=\"{}\" "
        "x2=\"{}\" y2=\"{}\"/>\n",
        k, p.x, p.y, q.x, q.y);
  }
  s += "</g>\n</g>\n</svg>\n";
  return s;
}

}  // namespace drivegym
