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
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "drivegym/cle.hpp"
#include "drivegym/errors.hpp"
#include "drivegym/geometry.hpp"
#include "drivegym/kinematics.hpp"
#include "drivegym/raster.hpp"
#include "drivegym/reward.hpp"
#include "drivegym/scene.hpp"
#include "drivegym/simulation_output.hpp"

namespace drivegym {

enum class ActionMode { pose_delta, kinematic };
enum class AgentMode { log_replay, reactive };

inline std::string_view to_string(ActionMode m) {
  return m == ActionMode::pose_delta ? "pose_delta" : "kinematic";
}
inline std::string_view to_string(AgentMode m) {
  return m == AgentMode::log_replay ? "log_replay" : "reactive";
}

struct StartFramePolicy {
  enum class Kind { fixed, random };
  Kind kind = Kind::fixed;
  std::size_t index = 0;   // fixed
  std::uint64_t seed = 0;  // random

  static StartFramePolicy fixed(std::size_t i) { return {Kind::fixed, i, 0}; }
  static StartFramePolicy random(std::uint64_t seed) {
    return {Kind::random, 0, seed};
  }

  friend bool operator==(const StartFramePolicy&,
                         const StartFramePolicy&) = default;
};

inline constexpr std::size_t kDefaultEpisodeSteps = 32;
inline constexpr double kDefaultReactiveRadius = 100.0;

struct EnvConfig {
  RasterConfig raster;
  ActionMode action_mode = ActionMode::pose_delta;
  std::size_t max_episode_steps = kDefaultEpisodeSteps;
  AgentMode agent_mode = AgentMode::log_replay;
  StartFramePolicy start_frame = StartFramePolicy::fixed(0);
  RewardSpec reward = RewardSpec::imitation();
  bool terminate_on_collision = false;
  bool allow_reverse = false;
  // Reactive agents farther than this from the ego leave the simulation.
  double reactive_radius = kDefaultReactiveRadius;

  void validate(const MetricRegistry& registry) const {
    raster.validate();
    if (max_episode_steps < 1) {
      throw ConfigError("max_episode_steps must be >= 1");
    }
    if (!(reactive_radius > 0.0)) {
      throw ConfigError("reactive_radius must be > 0");
    }
    reward.validate(registry);
  }

  friend bool operator==(const EnvConfig&, const EnvConfig&) = default;
};

struct StepInfo {
  std::size_t frame_index = 0;
  Pose2 ego_pose;
  Pose2 recorded_ego_pose;
  // First non-none classification over agents in frame order.
  CollisionType collision = CollisionType::none;
};

struct StepResult {
  Raster observation;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

// ---------------------------------------------------------------------------
// Agent control.

struct ControllerContext {
  const Scene& scene;
  std::size_t next_frame;
  std::span<const AgentRecord> current_agents;  // simulated, at next_frame-1
  const AgentRecord& ego;                       // simulated, at next_frame
};

// Produces the agents of the next frame. Must keep track ids; may only add
// or drop agents as the log does.
class AgentController {
 public:
  virtual ~AgentController() = default;
  virtual void reset(const Scene& /*scene*/, std::size_t /*start_frame*/) {}
  virtual std::vector<AgentRecord> advance(const ControllerContext& ctx) = 0;
};

// Replays logged agents verbatim, ignoring the simulated ego.
class LogReplayController final : public AgentController {
 public:
  std::vector<AgentRecord> advance(const ControllerContext& ctx) override {
    return ctx.scene.frames[ctx.next_frame].agents;
  }
};

// Agents present at the start frame keep their last velocity and yaw. An
// agent leaves once it is farther than `radius` from the simulated ego.
class ConstantVelocityController final : public AgentController {
 public:
  explicit ConstantVelocityController(double radius = kDefaultReactiveRadius)
      : radius_(radius) {}

  std::vector<AgentRecord> advance(const ControllerContext& ctx) override {
    std::vector<AgentRecord> next;
    next.reserve(ctx.current_agents.size());
    for (AgentRecord a : ctx.current_agents) {
      a.pose.centroid += ctx.scene.dt * a.velocity;
      if (distance(a.pose.centroid, ctx.ego.pose.centroid) <= radius_) {
        next.push_back(a);
      }
    }
    return next;
  }

 private:
  double radius_;
};

inline std::unique_ptr<AgentController> log_replay_controller() {
  return std::make_unique<LogReplayController>();
}

inline std::unique_ptr<AgentController> constant_velocity_controller(
    double radius = kDefaultReactiveRadius) {
  return std::make_unique<ConstantVelocityController>(radius);
}

// ---------------------------------------------------------------------------

// What a policy may look at besides the raster.
struct PolicyContext {
  const Scene* scene = nullptr;
  std::size_t frame_index = 0;
  std::size_t start_frame = 0;
  EgoKinematicState ego;
  ActionMode action_mode = ActionMode::pose_delta;
  double dt = kDefaultDt;
};

// Single-threaded episodic environment over a shared immutable dataset.
// Construct one instance per worker.
class Environment {
 public:
  Environment(std::shared_ptr<const Dataset> dataset, EnvConfig config,
              std::shared_ptr<const MetricRegistry> registry = nullptr)
      : dataset_(std::move(dataset)),
        config_(std::move(config)),
        registry_(registry ? std::move(registry)
                           : std::make_shared<const MetricRegistry>(
                                 MetricRegistry::with_builtins())) {
    if (!dataset_) throw ConfigError("Environment needs a dataset");
    config_.validate(*registry_);
    map_ = RasterMap(dataset_->map);
  }

  // Replaces the controller selected by agent_mode. Applies from the next
  // reset().
  void set_agent_controller(std::unique_ptr<AgentController> controller) {
    custom_controller_ = std::move(controller);
  }

  Raster reset(std::size_t scene_index) {
    if (scene_index >= dataset_->scenes.size()) {
      throw EpisodeError("scene index " + std::to_string(scene_index) +
                         " out of range (" +
                         std::to_string(dataset_->scenes.size()) + " scenes)");
    }
    scene_ = &dataset_->scenes[scene_index];
    const std::size_t start = choose_start_frame();
    if (scene_->size() < 2 || start > scene_->size() - 2) {
      throw EpisodeError("start frame " + std::to_string(start) +
                         " leaves fewer than 2 frames in scene '" +
                         scene_->scene_id + "'");
    }
    ++episode_count_;

    controller_ = custom_controller_ ? custom_controller_.get()
                                     : builtin_controller();
    controller_->reset(*scene_, start);

    const Frame& f = scene_->frames[start];
    start_frame_ = start;
    frame_ = start;
    steps_ = 0;
    done_ = false;
    active_ = true;
    ego_ = {f.ego.pose, norm(f.ego.velocity)};
    sim_frames_.clear();
    sim_frames_.push_back({f.ego, f.agents});

    output_ = {};
    output_.scene_id = scene_->scene_id;
    output_.start_frame = start;
    output_.dt = scene_->dt;
    output_.ego_extent = f.ego.extent;
    output_.simulated_ego_states.push_back(f.ego.pose);
    output_.recorded_ego_states.push_back(f.ego.pose);
    output_.simulated_agent_states.push_back(f.agents);
    return observe();
  }

  StepResult step(const Action& action) {
    if (!active_) throw EpisodeError("step() called before reset()");
    if (done_) throw EpisodeError("step() called after the episode is done");
    if (!is_finite(action)) throw EpisodeError("action has non-finite values");

    const double dt = scene_->dt;
    if (config_.action_mode == ActionMode::pose_delta) {
      const auto* d = std::get_if<PoseDelta>(&action);
      if (!d) throw EpisodeError("expected a PoseDelta action");
      const Pose2 next = apply_pose_delta(ego_.pose, *d);
      ego_ = {next, distance(next.centroid, ego_.pose.centroid) / dt};
    } else {
      const auto* k = std::get_if<KinematicAction>(&action);
      if (!k) throw EpisodeError("expected a KinematicAction action");
      ego_ = unicycle_step(ego_, *k, dt, config_.allow_reverse);
    }

    const std::size_t next = frame_ + 1;
    const Frame& logged = scene_->frames[next];
    const AgentRecord sim_ego{kEgoTrackId, ego_.pose, logged.ego.extent,
                              ego_.speed * heading(ego_.pose.yaw)};
    const ControllerContext ctx{*scene_, next, sim_frames_.back().agents,
                                sim_ego};
    std::vector<AgentRecord> agents = controller_->advance(ctx);

    output_.simulated_ego_states.push_back(ego_.pose);
    output_.recorded_ego_states.push_back(logged.ego.pose);
    output_.simulated_agent_states.push_back(agents);
    sim_frames_.push_back({sim_ego, std::move(agents)});
    frame_ = next;
    ++steps_;

    StepResult r;
    r.info.frame_index = next;
    r.info.ego_pose = ego_.pose;
    r.info.recorded_ego_pose = logged.ego.pose;
    const OrientedBox ego_box{ego_.pose, logged.ego.extent};
    for (const auto& a : sim_frames_.back().agents) {
      r.info.collision = classify_collision(ego_box, OrientedBox::of(a));
      if (r.info.collision != CollisionType::none) break;
    }
    r.reward = compose_reward(config_.reward, frame_metrics(), *registry_);
    done_ = next + 1 >= scene_->size() || steps_ >= config_.max_episode_steps ||
            (config_.terminate_on_collision &&
             r.info.collision != CollisionType::none);
    r.done = done_;
    r.observation = observe();
    return r;
  }

  bool active() const noexcept { return active_; }
  bool done() const noexcept { return done_; }
  std::size_t frame_index() const noexcept { return frame_; }
  std::size_t start_frame() const noexcept { return start_frame_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t episode_count() const noexcept { return episode_count_; }
  const EgoKinematicState& ego_state() const noexcept { return ego_; }
  const SimulationOutput& output() const noexcept { return output_; }
  const EnvConfig& config() const noexcept { return config_; }
  const Dataset& dataset() const noexcept { return *dataset_; }
  const MetricRegistry& registry() const noexcept { return *registry_; }
  const Scene& scene() const {
    if (!scene_) throw EpisodeError("no scene selected; call reset()");
    return *scene_;
  }

  PolicyContext policy_context() const {
    return {scene_, frame_, start_frame_, ego_, config_.action_mode,
            scene_ ? scene_->dt : kDefaultDt};
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  // Random starts depend only on (seed, episode counter), so a freshly
  // constructed environment repeats the same sequence.
  std::size_t choose_start_frame() const {
    const auto& p = config_.start_frame;
    if (p.kind == StartFramePolicy::Kind::fixed) return p.index;
    if (scene_->size() < 2) return 0;
    const std::uint64_t h =
        splitmix64(p.seed ^ splitmix64(static_cast<std::uint64_t>(episode_count_)));
    return static_cast<std::size_t>(h % (scene_->size() - 1));
  }

  AgentController* builtin_controller() {
    if (config_.agent_mode == AgentMode::log_replay) {
      if (!replay_) replay_ = log_replay_controller();
      return replay_.get();
    }
    if (!reactive_) reactive_ = constant_velocity_controller(config_.reactive_radius);
    return reactive_.get();
  }

  // Per-frame metric values at the newest frame, for the reward.
  FrameMetrics frame_metrics() const {
    FrameMetrics values;
    for (const auto& c : config_.reward.components) {
      if (values.contains(c.metric)) continue;
      const Series s = registry_->find_metric(c.metric)->compute(output_);
      values.emplace(c.metric, s.empty() ? 0.0 : s.back());
    }
    return values;
  }

  // Raster at the current frame. Frames before the episode start come from
  // the log; earlier than the scene start they render empty.
  Raster observe() const {
    const int slots = config_.raster.history_frames + 1;
    std::vector<FrameState> logged;
    logged.reserve(static_cast<std::size_t>(slots));
    std::vector<const FrameState*> history(static_cast<std::size_t>(slots),
                                           nullptr);
    for (int slot = 0; slot < slots; ++slot) {
      const long f = static_cast<long>(frame_) - (slots - 1 - slot);
      if (f < 0) continue;
      if (f >= static_cast<long>(start_frame_)) {
        history[static_cast<std::size_t>(slot)] =
            &sim_frames_[static_cast<std::size_t>(f) - start_frame_];
      } else {
        const Frame& fr = scene_->frames[static_cast<std::size_t>(f)];
        logged.push_back({fr.ego, fr.agents});
        history[static_cast<std::size_t>(slot)] = &logged.back();
      }
    }
    return render_raster(map_, history, frame_, config_.raster);
  }

  std::shared_ptr<const Dataset> dataset_;
  EnvConfig config_;
  std::shared_ptr<const MetricRegistry> registry_;
  RasterMap map_;

  std::unique_ptr<AgentController> custom_controller_;
  std::unique_ptr<AgentController> replay_;
  std::unique_ptr<AgentController> reactive_;
  AgentController* controller_ = nullptr;

  const Scene* scene_ = nullptr;
  std::size_t start_frame_ = 0;
  std::size_t frame_ = 0;
  std::size_t steps_ = 0;
  std::size_t episode_count_ = 0;
  bool active_ = false;
  bool done_ = false;
  EgoKinematicState ego_;
  std::vector<FrameState> sim_frames_;  // frames start..current
  SimulationOutput output_;
};

// ---------------------------------------------------------------------------
// Policies and rollout.

using Policy = std::function<Action(const Raster&, const PolicyContext&)>;

// Delta from `from` to `to`, refined so that applying it reproduces `to`
// bit-for-bit whenever the floating-point grid allows it.
inline PoseDelta exact_pose_delta(const Pose2& from, const Pose2& to) {
  PoseDelta d = pose_delta_between(from, to);
  for (int i = 0; i < 8; ++i) {
    const Pose2 got = apply_pose_delta(from, d);
    if (got == to) break;
    const Vec2 r = rotate(to.centroid - got.centroid, -from.yaw);
    d.dx += r.x;
    d.dy += r.y;
    d.dyaw += normalize_angle(to.yaw - got.yaw);
  }
  return d;
}

// Follows the logged ego. Exact in pose_delta mode; in kinematic mode it
// inverts the unicycle update, which only approximates curved motion.
inline Policy replay_policy() {
  return [](const Raster&, const PolicyContext& ctx) -> Action {
    const Pose2& target = ctx.scene->frames[ctx.frame_index + 1].ego.pose;
    if (ctx.action_mode == ActionMode::pose_delta) {
      return exact_pose_delta(ctx.ego.pose, target);
    }
    const double speed = distance(target.centroid, ctx.ego.pose.centroid) / ctx.dt;
    return KinematicAction{(speed - ctx.ego.speed) / ctx.dt,
                           normalize_angle(target.yaw - ctx.ego.pose.yaw) /
                               ctx.dt};
  };
}

// The zero element of the action space.
inline Policy zero_policy() {
  return [](const Raster&, const PolicyContext& ctx) -> Action {
    if (ctx.action_mode == ActionMode::pose_delta) return PoseDelta{};
    return KinematicAction{};
  };
}

// Keeps the ego's current speed and heading.
inline Policy constant_velocity_policy() {
  return [](const Raster&, const PolicyContext& ctx) -> Action {
    if (ctx.action_mode == ActionMode::pose_delta) {
      return PoseDelta{ctx.ego.speed * ctx.dt, 0.0, 0.0};
    }
    return KinematicAction{};
  };
}

// reset() then step() until done. Rewards per step are appended to
// `rewards` when given.
inline SimulationOutput rollout(Environment& env, const Policy& policy,
                                std::size_t scene_index,
                                std::vector<double>* rewards = nullptr) {
  Raster obs = env.reset(scene_index);
  while (!env.done()) {
    StepResult r = env.step(policy(obs, env.policy_context()));
    if (rewards) rewards->push_back(r.reward);
    obs = std::move(r.observation);
  }
  return env.output();
}

}  // namespace drivegym
