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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "drivegym.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

using namespace drivegym;
using fixtures::output_from_points;
using fixtures::output_with_fde;

const MetricRegistry& builtins() {
  static const MetricRegistry r = MetricRegistry::with_builtins();
  return r;
}

TEST(Cle, DisplacementExamples) {
  const auto o = output_from_points("s", {{0, 0}, {1, 0}, {2, 0}},
                                    {{0, 0}, {1, 1}, {2, 2}});
  const Series s = l2_displacement_series(o);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s[0], 0.0, 1e-9);
  EXPECT_NEAR(s[1], 1.0, 1e-9);
  EXPECT_NEAR(s[2], 2.0, 1e-9);
  EXPECT_NEAR(ade(o), 1.0, 1e-9);
  EXPECT_NEAR(fde(o), 2.0, 1e-9);

  const auto shifted = output_from_points("c", {{3, 4}, {4, 4}, {-1, 9}},
                                          {{0, 0}, {1, 0}, {-4, 5}});
  for (double v : l2_displacement_series(shifted)) EXPECT_NEAR(v, 5.0, 1e-9);

  const auto same = output_from_points("i", {{1, 2}, {3, 4}}, {{1, 2}, {3, 4}});
  EXPECT_EQ(ade(same), 0.0);
  EXPECT_EQ(fde(same), 0.0);

  const auto one = output_from_points("o", {{3, 4}}, {{0, 0}});
  EXPECT_EQ(ade(one), fde(one));

  auto broken = o;
  broken.recorded_ego_states.pop_back();
  EXPECT_THROW(l2_displacement_series(broken), EvaluationError);
  EXPECT_THROW(fde(output_from_points("e", {}, {})), EvaluationError);
}

TEST(Cle, DistanceToReferenceExamples) {
  // Recorded line y = 0 sampled every 0.1 m; simulated points one meter off,
  // halfway between samples.
  std::vector<Vec2> line, off;
  for (int i = -50; i <= 50; ++i) {
    line.push_back({0.1 * i, 0.0});
    off.push_back({0.1 * i + 0.05, 1.0});
  }
  for (double v : distance_to_reference_series(output_from_points("l", off, line))) {
    EXPECT_NEAR(v, 1.0, 0.005);
  }

  // Time-shifted path: zero distance, nonzero displacement.
  std::vector<Vec2> rec, sim;
  for (int i = 0; i < 20; ++i) rec.push_back({1.0 * i, 0.0});
  for (int i = 0; i < 20; ++i) sim.push_back(rec[static_cast<std::size_t>(std::max(0, i - 3))]);
  const auto lag = output_from_points("lag", sim, rec);
  for (double v : distance_to_reference_series(lag)) EXPECT_EQ(v, 0.0);
  EXPECT_GT(ade(lag), 0.0);

  // Single waypoint: plain distance to it.
  SimulationOutput single = output_from_points("w", {{3, 4}, {6, 8}}, {{0, 0}, {0, 0}});
  single.recorded_ego_states.resize(1);
  const Series s = distance_to_reference_series(single);
  EXPECT_NEAR(s[0], 5.0, 1e-12);
  EXPECT_NEAR(s[1], 10.0, 1e-12);
}

TEST(Cle, DistanceToReferenceBoundedByDisplacement) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Vec2> a, b;
    for (int i = 0; i < 30; ++i) {
      a.push_back({u(rng), u(rng)});
      b.push_back({u(rng), u(rng)});
    }
    const auto o = output_from_points("r", a, b);
    const Series d = distance_to_reference_series(o);
    const Series l = l2_displacement_series(o);
    for (std::size_t t = 0; t < d.size(); ++t) ASSERT_LE(d[t], l[t]);
    EXPECT_GE(ade(o), 0.0);
    EXPECT_GE(fde(o), 0.0);
  }
}

// Ego driving along +x; an agent planted overlapping dead ahead at frame 5
// only, and far away otherwise.
SimulationOutput planted_collision(Vec2 offset) {
  SimulationOutput o;
  o.scene_id = "planted";
  o.ego_extent = {4.8, 1.9};
  for (int t = 0; t < 12; ++t) {
    const Pose2 ego{{1.0 * t, 0.0}, 0.0};
    o.simulated_ego_states.push_back(ego);
    o.recorded_ego_states.push_back(ego);
    const Vec2 at = t == 5 ? ego.centroid + offset : Vec2{1e3, 1e3};
    o.simulated_agent_states.push_back({fixtures::agent(1, {at, 0.0}, {4.5, 1.8})});
  }
  return o;
}

TEST(Cle, CollisionSeriesOnPlantedScene) {
  const auto o = planted_collision({3.0, 0.0});
  const Series front = collision_series(o, CollisionType::front);
  for (std::size_t t = 0; t < front.size(); ++t) EXPECT_EQ(front[t], t == 5 ? 1.0 : 0.0);
  for (double v : collision_series(o, CollisionType::rear)) EXPECT_EQ(v, 0.0);
  for (double v : collision_series(o, CollisionType::side)) EXPECT_EQ(v, 0.0);

  const Series rear = collision_series(planted_collision({-3.0, 0.0}), CollisionType::rear);
  EXPECT_EQ(rear[5], 1.0);
  const Series side = collision_series(planted_collision({0.5, 1.5}), CollisionType::side);
  EXPECT_EQ(side[5], 1.0);

  SimulationOutput empty = output_from_points("e", {{0, 0}, {1, 0}}, {{0, 0}, {1, 0}});
  for (auto kind : {CollisionType::front, CollisionType::side, CollisionType::rear}) {
    for (double v : collision_series(empty, kind)) EXPECT_EQ(v, 0.0);
  }
  EXPECT_THROW(CollisionMetric(CollisionType::none), ConfigError);
}

// Over random ego/agent pairs at most one collision series is set.
TEST(Cle, CollisionSeriesMutuallyExclusive) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-6, 6), yaw(-3.14, 3.14);
  SimulationOutput o;
  o.ego_extent = {4.8, 1.9};
  for (int t = 0; t < 2000; ++t) {
    o.simulated_ego_states.push_back({{u(rng), u(rng)}, yaw(rng)});
    o.recorded_ego_states.push_back(o.simulated_ego_states.back());
    o.simulated_agent_states.push_back(
        {fixtures::agent(1, {{u(rng), u(rng)}, yaw(rng)}, {4.5, 1.8})});
  }
  const Series f = collision_series(o, CollisionType::front);
  const Series s = collision_series(o, CollisionType::side);
  const Series r = collision_series(o, CollisionType::rear);
  int hits = 0;
  for (std::size_t t = 0; t < f.size(); ++t) {
    ASSERT_LE(f[t] + s[t] + r[t], 1.0);
    const bool touching = obb_intersects({o.simulated_ego_states[t], o.ego_extent},
                                         OrientedBox::of(o.simulated_agent_states[t][0]));
    EXPECT_EQ(f[t] + s[t] + r[t] == 1.0, touching);
    hits += touching;
  }
  EXPECT_GT(hits, 100);
}

TEST(Cle, ValidatorExamples) {
  const Validator fde_v{"fde", "l2_displacement_error", Comparison::ge, 30.0,
                        ValidatorScope::final_frame};
  EXPECT_FALSE(apply_validator(fde_v, 35.0));
  EXPECT_TRUE(apply_validator(fde_v, 29.9));
  EXPECT_FALSE(apply_validator(fde_v, 30.0));
  EXPECT_FALSE(apply_validator(fde_v, Series{0.0, 35.0}));
  EXPECT_TRUE(apply_validator(fde_v, Series{35.0, 29.9}));

  const Validator d2r{"d2r", "distance_to_reference", Comparison::ge, 4.0,
                      ValidatorScope::any_frame};
  const ValidatorResult r = run_validator(d2r, {0.0, 1.0, 4.2, 0.5});
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.value, 4.2);
  EXPECT_TRUE(apply_validator(d2r, Series{0.0, 3.99}));

  const Validator mean_le{"slow", "x", Comparison::le, 2.0, ValidatorScope::scene_mean};
  EXPECT_FALSE(apply_validator(mean_le, Series{1.0, 3.0}));
  EXPECT_TRUE(apply_validator(mean_le, Series{1.0, 3.1}));
}

TEST(Cle, PassedDrivenMiles) {
  // Straight scene, 10 m/s, 32 steps of 0.1 s: 32 m.
  auto d = std::make_shared<const Dataset>(
      fixtures::dataset_of({fixtures::straight_scene("s", 50, 10.0)}));
  Environment env(d, EnvConfig{});
  const SimulationOutput o = rollout(env, replay_policy(), 0);
  EXPECT_NEAR(driven_miles(o), 0.019884, 1e-6);
  EXPECT_NEAR(driven_miles(o), 32.0 / 1609.344, 1e-12);
  const EvaluationReport rep = evaluate(EvaluationPlan::default_plan(), {o});
  EXPECT_NEAR(rep.scenes[0].composites[0].second, 0.019884, 1e-6);

  EXPECT_EQ(passed_driven_miles(o, {{"a", true, 0}, {"b", false, 0}}), 0.0);
  const auto still = output_from_points("st", {{1, 1}, {1, 1}}, {{1, 1}, {1, 1}});
  EXPECT_EQ(passed_driven_miles(still, {{"a", true, 0}}), 0.0);
}

TEST(Cle, EvaluateHandOracle) {
  const std::vector<SimulationOutput> outs = {
      output_with_fde("a", 10), output_with_fde("b", 35), output_with_fde("c", 40)};
  EvaluationPlan plan;
  plan.metrics = {"l2_displacement_error"};
  plan.validators = {{"final_displacement", "l2_displacement_error",
                      Comparison::ge, 30.0, ValidatorScope::final_frame}};
  const EvaluationReport r = evaluate(plan, outs, builtins());
  const oracle::MeanStd hand = oracle::mean_std({10, 35, 40});
  EXPECT_NEAR(hand.mean, 28.33, 0.01);
  EXPECT_NEAR(hand.stddev, 13.12, 0.01);
  ASSERT_NE(r.metric("l2_displacement_error"), nullptr);
  EXPECT_NEAR(r.metric("l2_displacement_error")->final_value.mean, hand.mean, 1e-9);
  EXPECT_NEAR(r.metric("l2_displacement_error")->final_value.stddev, hand.stddev, 1e-9);
  EXPECT_EQ(r.validator("final_displacement")->failed_scenes, 2u);
  std::size_t failures = 0;
  for (const auto& s : r.scenes) failures += !s.validators[0].passed;
  EXPECT_EQ(failures, 2u);
  // Frame mean of (0, fde): half the final value.
  const oracle::MeanStd half = oracle::mean_std({5, 17.5, 20});
  EXPECT_NEAR(r.metric("l2_displacement_error")->mean.mean, half.mean, 1e-9);

  const std::string text = format_report(r);
  EXPECT_NE(text.find("Final Displacement"), std::string::npos);
  EXPECT_NE(text.find("28.33 (13.12)"), std::string::npos) << text;
  EXPECT_NE(text.find("final_displacement (>= 30)"), std::string::npos) << text;
}

TEST(Cle, PerfectReplayReport) {
  const auto o = output_from_points("p", {{0, 0}, {1, 0}}, {{0, 0}, {1, 0}});
  const EvaluationReport r = evaluate(EvaluationPlan::default_plan(), {o});
  for (const auto& m : r.metrics) {
    EXPECT_EQ(m.mean.mean, 0.0) << m.name;
    EXPECT_EQ(m.final_value.mean, 0.0) << m.name;
  }
  for (const auto& v : r.validators) EXPECT_EQ(v.failed_scenes, 0u) << v.name;
}

TEST(Cle, PlanErrors) {
  EvaluationPlan plan;
  plan.metrics = {"nope"};
  EXPECT_THROW(evaluate(plan, {}, builtins()), EvaluationError);
  plan.metrics = {"l2_displacement_error"};
  plan.validators = {{"v", "distance_to_reference", Comparison::ge, 1.0,
                      ValidatorScope::any_frame}};
  EXPECT_THROW(check_plan(plan, builtins()), EvaluationError);
  plan.validators.clear();
  plan.composites = {"unknown_composite"};
  EXPECT_THROW(check_plan(plan, builtins()), EvaluationError);
  EXPECT_NO_THROW(check_plan(EvaluationPlan::default_plan(), builtins()));

  // Metric errors name the scene.
  auto bad = output_from_points("broken_scene", {{0, 0}, {1, 0}}, {{0, 0}});
  try {
    evaluate(EvaluationPlan::default_plan(), {bad});
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_NE(std::string(e.what()).find("broken_scene"), std::string::npos);
  }
}

TEST(Cle, EmptyOutputsGiveEmptyReport) {
  const EvaluationReport r = evaluate(EvaluationPlan::default_plan(), {});
  EXPECT_TRUE(r.empty());
  EXPECT_TRUE(r.metrics.empty());
  EXPECT_NE(format_report(r).find("0 scene"), std::string::npos);
}

class YawError final : public Metric {
 public:
  std::string name() const override { return "yaw_error"; }
  Series compute(const SimulationOutput& o) const override {
    Series s;
    for (std::size_t t = 0; t < o.size(); ++t) {
      s.push_back(std::abs(normalize_angle(o.simulated_ego_states[t].yaw -
                                           o.recorded_ego_states[t].yaw)));
    }
    return s;
  }
};

TEST(Cle, RegistrationAndUserMetric) {
  MetricRegistry r = MetricRegistry::with_builtins();
  EXPECT_THROW(r.register_metric(std::make_shared<L2DisplacementErrorMetric>()),
               ConfigError);
  EXPECT_THROW(r.register_composite(std::make_shared<PassedDrivenMilesComposite>()),
               ConfigError);
  r.register_metric(std::make_shared<YawError>());
  EXPECT_THROW(r.register_metric(std::make_shared<YawError>()), ConfigError);

  // Replay with every simulated pose rotated by a fixed offset.
  const double offset = 0.2;
  auto d = std::make_shared<const Dataset>(generate_synthetic(1, 2, 60, 2));
  auto reg = std::make_shared<const MetricRegistry>(r);
  Environment env(d, EnvConfig{}, reg);
  const Policy rotated = [&](const Raster&, const PolicyContext& ctx) -> Action {
    Pose2 target = ctx.scene->frames[ctx.frame_index + 1].ego.pose;
    target.yaw = normalize_angle(target.yaw + offset);
    return exact_pose_delta(ctx.ego.pose, target);
  };
  env.reset(1);
  const PoseDelta turn{0, 0, offset};
  Raster obs = env.step(turn).observation;
  while (!env.done()) obs = env.step(rotated(obs, env.policy_context())).observation;
  EvaluationPlan plan;
  plan.metrics = {"yaw_error", "l2_displacement_error"};
  plan.validators = {{"yaw", "yaw_error", Comparison::ge, 0.3, ValidatorScope::any_frame}};
  const EvaluationReport rep = evaluate(plan, {env.output()}, *reg);
  const auto& series = rep.scenes[0].metrics[0].series;
  EXPECT_EQ(series[0], 0.0);
  // The first step turns in place while the log moves on.
  for (std::size_t t = 2; t < series.size(); ++t) EXPECT_NEAR(series[t], offset, 1e-9);
  EXPECT_EQ(rep.validator("yaw")->failed_scenes, 0u);
}

TEST(Cle, DeterministicAndOrderInvariant) {
  const auto d = std::make_shared<const Dataset>(generate_synthetic(2, 9, 80, 5));
  std::vector<SimulationOutput> outs;
  for (std::size_t i = 0; i < d->scenes.size(); ++i) {
    Environment env(d, EnvConfig{});
    outs.push_back(rollout(env, i % 2 ? zero_policy() : constant_velocity_policy(), i));
  }
  const auto plan = EvaluationPlan::default_plan();
  const auto a = to_json(evaluate(plan, outs)).dump();
  EXPECT_EQ(a, to_json(evaluate(plan, outs)).dump());
  EXPECT_EQ(a, to_json(evaluate(plan, outs, builtins(), 4)).dump());

  const auto aggregates = [](const EvaluationReport& r) {
    auto j = to_json(r);
    j.erase("scenes");
    return j.dump();
  };
  const std::string base = aggregates(evaluate(plan, outs));
  std::mt19937_64 rng(3);
  for (int k = 0; k < 10; ++k) {
    std::shuffle(outs.begin(), outs.end(), rng);
    EXPECT_EQ(aggregates(evaluate(plan, outs)), base);
  }
}

}  // namespace
