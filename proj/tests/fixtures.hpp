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

// Hand-built scenes, rollouts and scratch directories shared by the tests.

#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <system_error>
#include <unistd.h>
#include <vector>

#include "drivegym.hpp"

namespace fixtures {

using namespace drivegym;

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("drivegym_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

// Ego driving along +x from `origin` at constant `speed`.
inline Scene straight_scene(std::string id, std::size_t frames, double speed,
                            Vec2 origin = {100.0, 200.0}, double dt = 0.1) {
  Scene s;
  s.scene_id = std::move(id);
  s.dt = dt;
  for (std::size_t i = 0; i < frames; ++i) {
    Frame f;
    f.index = i;
    f.timestamp = static_cast<double>(i) * dt;
    f.ego.pose = {origin + Vec2{speed * f.timestamp, 0.0}, 0.0};
    f.ego.extent = {4.0, 2.0};
    f.ego.velocity = {speed, 0.0};
    s.frames.push_back(f);
  }
  return s;
}

inline AgentRecord agent(std::int64_t id, Pose2 pose, Extent extent = {4.0, 2.0},
                         Vec2 velocity = {}) {
  return {id, pose, extent, velocity};
}

inline Dataset dataset_of(std::vector<Scene> scenes, SemanticMap map = {}) {
  Dataset d;
  d.map = std::move(map);
  d.scenes = std::move(scenes);
  return d;
}

// Rollout with the given centroids and no agents.
inline SimulationOutput output_from_points(std::string id,
                                           const std::vector<Vec2>& simulated,
                                           const std::vector<Vec2>& recorded) {
  SimulationOutput o;
  o.scene_id = std::move(id);
  for (Vec2 p : simulated) o.simulated_ego_states.push_back({p, 0.0});
  for (Vec2 p : recorded) o.recorded_ego_states.push_back({p, 0.0});
  o.simulated_agent_states.resize(simulated.size());
  return o;
}

// Two-frame rollout whose final displacement is exactly `fde`.
inline SimulationOutput output_with_fde(std::string id, double fde) {
  return output_from_points(std::move(id), {{0, 0}, {fde, 0}},
                            {{0, 0}, {0, 0}});
}

}  // namespace fixtures
