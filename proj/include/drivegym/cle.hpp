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
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drivegym/errors.hpp"
#include "drivegym/geometry.hpp"
#include "drivegym/parallel.hpp"
#include "drivegym/simulation_output.hpp"

namespace drivegym {

using Series = std::vector<double>;

// Whether larger values are worse (cost) or better (bonus). Rewards negate
// costs and add bonuses.
enum class Polarity { cost, bonus };

// Per-frame metric over a rollout. Implementations must be pure and
// re-entrant: evaluate() runs scenes concurrently.
class Metric {
 public:
  virtual ~Metric() = default;
  virtual std::string name() const = 0;
  virtual Polarity polarity() const { return Polarity::cost; }
  // One value per rolled-out frame.
  virtual Series compute(const SimulationOutput& output) const = 0;
};

// ---------------------------------------------------------------------------
// Built-in metrics.

// ||simulated centroid - recorded centroid|| per frame. Its frame mean is the
// ADE, its last value the FDE.
inline Series l2_displacement_series(const SimulationOutput& o) {
  if (o.simulated_ego_states.size() != o.recorded_ego_states.size()) {
    throw EvaluationError("scene '" + o.scene_id +
                          "': simulated and recorded ego series differ in "
                          "length");
  }
  Series s(o.size());
  for (std::size_t t = 0; t < s.size(); ++t) {
    s[t] = distance(o.simulated_ego_states[t].centroid,
                    o.recorded_ego_states[t].centroid);
  }
  return s;
}

inline double series_mean(const Series& s) {
  if (s.empty()) throw EvaluationError("mean of an empty series");
  return std::accumulate(s.begin(), s.end(), 0.0) /
         static_cast<double>(s.size());
}

inline double ade(const SimulationOutput& o) {
  return series_mean(l2_displacement_series(o));
}

inline double fde(const SimulationOutput& o) {
  const Series s = l2_displacement_series(o);
  if (s.empty()) {
    throw EvaluationError("scene '" + o.scene_id + "': empty rollout has no "
                          "final displacement");
  }
  return s.back();
}

// Distance from each simulated centroid to the nearest recorded waypoint.
inline Series distance_to_reference_series(const SimulationOutput& o) {
  Series s(o.size(), std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < s.size(); ++t) {
    const Vec2 p = o.simulated_ego_states[t].centroid;
    for (const auto& r : o.recorded_ego_states) {
      s[t] = std::min(s[t], distance(p, r.centroid));
    }
  }
  return s;
}

// 1 at frames where the ego collides with any simulated agent in sector
// `kind`, else 0.
inline Series collision_series(const SimulationOutput& o, CollisionType kind) {
  Series s(o.size(), 0.0);
  for (std::size_t t = 0; t < s.size(); ++t) {
    const OrientedBox ego{o.simulated_ego_states[t], o.ego_extent};
    for (const auto& a : o.simulated_agent_states[t]) {
      if (classify_collision(ego, OrientedBox::of(a)) == kind) {
        s[t] = 1.0;
        break;
      }
    }
  }
  return s;
}

class L2DisplacementErrorMetric final : public Metric {
 public:
  static constexpr const char* kName = "l2_displacement_error";
  std::string name() const override { return kName; }
  Series compute(const SimulationOutput& o) const override {
    return l2_displacement_series(o);
  }
};

class DistanceToReferenceMetric final : public Metric {
 public:
  static constexpr const char* kName = "distance_to_reference";
  std::string name() const override { return kName; }
  Series compute(const SimulationOutput& o) const override {
    return distance_to_reference_series(o);
  }
};

class CollisionMetric final : public Metric {
 public:
  explicit CollisionMetric(CollisionType kind) : kind_(kind) {
    if (kind == CollisionType::none) {
      throw ConfigError("collision metric needs front, side or rear");
    }
  }
  static std::string name_for(CollisionType kind) {
    return "collision_" + std::string(to_string(kind));
  }
  std::string name() const override { return name_for(kind_); }
  Series compute(const SimulationOutput& o) const override {
    return collision_series(o, kind_);
  }

 private:
  CollisionType kind_;
};

// ---------------------------------------------------------------------------
// Validators.

enum class Comparison { ge, le };
enum class ValidatorScope { any_frame, final_frame, scene_mean };

inline std::string_view to_string(Comparison c) {
  return c == Comparison::ge ? "ge" : "le";
}
inline std::string_view symbol(Comparison c) {
  return c == Comparison::ge ? ">=" : "<=";
}
inline std::string_view to_string(ValidatorScope s) {
  switch (s) {
    case ValidatorScope::any_frame:
      return "any_frame";
    case ValidatorScope::final_frame:
      return "final_frame";
    case ValidatorScope::scene_mean:
      return "scene_mean";
  }
  return "any_frame";
}

// The comparison states the failure condition: {metric, ge, 30} fails a
// scene whose scoped value is >= 30.
struct Validator {
  std::string name;
  std::string metric;
  Comparison comparison = Comparison::ge;
  double threshold = 0.0;
  ValidatorScope scope = ValidatorScope::any_frame;

  friend bool operator==(const Validator&, const Validator&) = default;
};

struct ValidatorResult {
  std::string name;
  bool passed = true;
  // Scoped value: for any_frame, the worst frame in the failure direction.
  double value = 0.0;
};

inline bool triggers(Comparison c, double value, double threshold) {
  return c == Comparison::ge ? value >= threshold : value <= threshold;
}

inline ValidatorResult run_validator(const Validator& v, const Series& s) {
  ValidatorResult r{v.name, true, 0.0};
  switch (v.scope) {
    case ValidatorScope::any_frame:
      if (s.empty()) return r;
      r.value = v.comparison == Comparison::ge
                    ? *std::max_element(s.begin(), s.end())
                    : *std::min_element(s.begin(), s.end());
      break;
    case ValidatorScope::final_frame:
      if (s.empty()) {
        throw EvaluationError("validator '" + v.name + "': empty series");
      }
      r.value = s.back();
      break;
    case ValidatorScope::scene_mean:
      r.value = series_mean(s);
      break;
  }
  r.passed = !triggers(v.comparison, r.value, v.threshold);
  return r;
}

// True when the scene passes.
inline bool apply_validator(const Validator& v, const Series& s) {
  return run_validator(v, s).passed;
}

inline bool apply_validator(const Validator& v, double scalar) {
  return !triggers(v.comparison, scalar, v.threshold);
}

// ---------------------------------------------------------------------------
// Composite metrics.

struct MetricResult {
  std::string name;
  Series series;
  double mean = 0.0;
  double final_value = 0.0;
};

class CompositeMetric {
 public:
  virtual ~CompositeMetric() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::string> required_metrics() const { return {}; }
  virtual double compute(const SimulationOutput& output,
                         const std::vector<MetricResult>& metrics,
                         const std::vector<ValidatorResult>& validators)
      const = 0;
};

inline constexpr double kMetersPerMile = 1609.344;

// Path length of the simulated centroid in miles.
inline double driven_miles(const SimulationOutput& o) {
  double meters = 0.0;
  for (std::size_t t = 1; t < o.size(); ++t) {
    meters += distance(o.simulated_ego_states[t].centroid,
                       o.simulated_ego_states[t - 1].centroid);
  }
  return meters / kMetersPerMile;
}

inline double passed_driven_miles(const SimulationOutput& o,
                                  const std::vector<ValidatorResult>& vs) {
  const bool all_passed = std::all_of(
      vs.begin(), vs.end(), [](const ValidatorResult& r) { return r.passed; });
  return all_passed ? driven_miles(o) : 0.0;
}

class PassedDrivenMilesComposite final : public CompositeMetric {
 public:
  static constexpr const char* kName = "passed_driven_miles";
  std::string name() const override { return kName; }
  double compute(const SimulationOutput& o, const std::vector<MetricResult>&,
                 const std::vector<ValidatorResult>& vs) const override {
    return passed_driven_miles(o, vs);
  }
};

// ---------------------------------------------------------------------------
// Registry.

class MetricRegistry {
 public:
  // Registry preloaded with the built-in metrics and composites.
  static MetricRegistry with_builtins() {
    MetricRegistry r;
    r.register_metric(std::make_shared<L2DisplacementErrorMetric>());
    r.register_metric(std::make_shared<DistanceToReferenceMetric>());
    for (auto kind :
         {CollisionType::front, CollisionType::side, CollisionType::rear}) {
      r.register_metric(std::make_shared<CollisionMetric>(kind));
    }
    r.register_composite(std::make_shared<PassedDrivenMilesComposite>());
    return r;
  }

  void register_metric(std::shared_ptr<const Metric> metric) {
    const std::string n = metric->name();
    if (metrics_.contains(n) || composites_.contains(n)) {
      throw ConfigError("metric '" + n + "' is already registered");
    }
    metrics_.emplace(n, std::move(metric));
  }

  void register_composite(std::shared_ptr<const CompositeMetric> composite) {
    const std::string n = composite->name();
    if (metrics_.contains(n) || composites_.contains(n)) {
      throw ConfigError("composite '" + n + "' is already registered");
    }
    composites_.emplace(n, std::move(composite));
  }

  const Metric* find_metric(std::string_view name) const {
    auto it = metrics_.find(std::string(name));
    return it == metrics_.end() ? nullptr : it->second.get();
  }
  const CompositeMetric* find_composite(std::string_view name) const {
    auto it = composites_.find(std::string(name));
    return it == composites_.end() ? nullptr : it->second.get();
  }

  std::vector<std::string> metric_names() const {
    std::vector<std::string> out;
    for (const auto& [n, _] : metrics_) out.push_back(n);
    return out;
  }

 private:
  std::map<std::string, std::shared_ptr<const Metric>> metrics_;
  std::map<std::string, std::shared_ptr<const CompositeMetric>> composites_;
};

// ---------------------------------------------------------------------------
// Evaluation plans and reports.

struct EvaluationPlan {
  std::vector<std::string> metrics;
  std::vector<Validator> validators;
  std::vector<std::string> composites;

  // Distance and collision metrics with the validators reported per scene
  // in the reference evaluation table.
  static EvaluationPlan default_plan() {
    EvaluationPlan p;
    p.metrics = {L2DisplacementErrorMetric::kName,
                 DistanceToReferenceMetric::kName,
                 CollisionMetric::name_for(CollisionType::front),
                 CollisionMetric::name_for(CollisionType::side),
                 CollisionMetric::name_for(CollisionType::rear)};
    p.validators = {
        {"final_displacement", L2DisplacementErrorMetric::kName,
         Comparison::ge, 30.0, ValidatorScope::final_frame},
        {"distance_to_reference", DistanceToReferenceMetric::kName,
         Comparison::ge, 4.0, ValidatorScope::any_frame},
        {"front_collision", CollisionMetric::name_for(CollisionType::front),
         Comparison::ge, 1.0, ValidatorScope::any_frame},
        {"side_collision", CollisionMetric::name_for(CollisionType::side),
         Comparison::ge, 1.0, ValidatorScope::any_frame},
        {"rear_collision", CollisionMetric::name_for(CollisionType::rear),
         Comparison::ge, 1.0, ValidatorScope::any_frame},
    };
    p.composites = {PassedDrivenMilesComposite::kName};
    return p;
  }

  friend bool operator==(const EvaluationPlan&,
                         const EvaluationPlan&) = default;
};

// Throws EvaluationError unless every name is registered, unique, and every
// validator/composite dependency is listed in `metrics`.
inline void check_plan(const EvaluationPlan& plan,
                       const MetricRegistry& registry) {
  const auto listed = [&](const std::string& m) {
    return std::find(plan.metrics.begin(), plan.metrics.end(), m) !=
           plan.metrics.end();
  };
  for (std::size_t i = 0; i < plan.metrics.size(); ++i) {
    const auto& m = plan.metrics[i];
    if (!registry.find_metric(m)) {
      throw EvaluationError("plan metrics[" + std::to_string(i) +
                            "]: unknown metric '" + m + "'");
    }
    if (std::find(plan.metrics.begin(), plan.metrics.begin() + i, m) !=
        plan.metrics.begin() + i) {
      throw EvaluationError("plan metrics[" + std::to_string(i) +
                            "]: duplicate metric '" + m + "'");
    }
  }
  for (std::size_t i = 0; i < plan.validators.size(); ++i) {
    const auto& v = plan.validators[i];
    const std::string at = "plan validators[" + std::to_string(i) + "] ('" +
                           v.name + "')";
    if (!registry.find_metric(v.metric)) {
      throw EvaluationError(at + ": unknown metric '" + v.metric + "'");
    }
    if (!listed(v.metric)) {
      throw EvaluationError(at + ": metric '" + v.metric +
                            "' is not listed in plan metrics");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (plan.validators[k].name == v.name) {
        throw EvaluationError(at + ": duplicate validator name");
      }
    }
  }
  for (std::size_t i = 0; i < plan.composites.size(); ++i) {
    const auto& c = plan.composites[i];
    const std::string at = "plan composites[" + std::to_string(i) + "]";
    const CompositeMetric* comp = registry.find_composite(c);
    if (!comp) throw EvaluationError(at + ": unknown composite '" + c + "'");
    for (const auto& dep : comp->required_metrics()) {
      if (!listed(dep)) {
        throw EvaluationError(at + ": composite '" + c + "' needs metric '" +
                              dep + "' which is not listed in plan metrics");
      }
    }
  }
}

struct SceneReport {
  std::string scene_id;
  std::vector<MetricResult> metrics;
  std::vector<ValidatorResult> validators;
  std::vector<std::pair<std::string, double>> composites;

  const MetricResult* metric(std::string_view name) const {
    for (const auto& m : metrics) {
      if (m.name == name) return &m;
    }
    return nullptr;
  }
  const ValidatorResult* validator(std::string_view name) const {
    for (const auto& v : validators) {
      if (v.name == name) return &v;
    }
    return nullptr;
  }
  bool all_passed() const {
    return std::all_of(validators.begin(), validators.end(),
                       [](const ValidatorResult& v) { return v.passed; });
  }
};

// Mean and population standard deviation across scenes.
struct Stat {
  double mean = 0.0;
  double stddev = 0.0;

  friend bool operator==(const Stat&, const Stat&) = default;
};

// Values are summed in sorted order so the result does not depend on scene
// order.
inline Stat population_stat(std::vector<double> xs) {
  if (xs.empty()) return {};
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

struct MetricAggregate {
  std::string name;
  Stat mean;         // statistics of per-scene frame means
  Stat final_value;  // statistics of per-scene final values
};

struct ValidatorAggregate {
  std::string name;
  Validator validator;
  std::size_t failed_scenes = 0;
};

struct CompositeAggregate {
  std::string name;
  Stat value;
};

struct EvaluationReport {
  std::vector<SceneReport> scenes;
  std::vector<MetricAggregate> metrics;
  std::vector<ValidatorAggregate> validators;
  std::vector<CompositeAggregate> composites;

  bool empty() const noexcept { return scenes.empty(); }

  const MetricAggregate* metric(std::string_view name) const {
    for (const auto& m : metrics) {
      if (m.name == name) return &m;
    }
    return nullptr;
  }
  const ValidatorAggregate* validator(std::string_view name) const {
    for (const auto& v : validators) {
      if (v.name == name) return &v;
    }
    return nullptr;
  }
  const CompositeAggregate* composite(std::string_view name) const {
    for (const auto& c : composites) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
};

// Metrics, then validators, then composites for one scene.
inline SceneReport evaluate_scene(const EvaluationPlan& plan,
                                  const SimulationOutput& output,
                                  const MetricRegistry& registry) {
  SceneReport sr;
  sr.scene_id = output.scene_id;
  const std::string at = "scene '" + output.scene_id + "'";
  if (output.size() == 0) throw EvaluationError(at + ": empty rollout");
  for (const auto& name : plan.metrics) {
    Series s;
    try {
      output.validate();
      s = registry.find_metric(name)->compute(output);
    } catch (const std::exception& e) {
      throw EvaluationError(at + ", metric '" + name + "': " + e.what());
    }
    if (s.size() != output.size()) {
      throw EvaluationError(at + ", metric '" + name + "': produced " +
                            std::to_string(s.size()) + " values for " +
                            std::to_string(output.size()) + " frames");
    }
    const double mean = series_mean(s);
    const double last = s.back();
    sr.metrics.push_back({name, std::move(s), mean, last});
  }
  for (const auto& v : plan.validators) {
    sr.validators.push_back(run_validator(v, sr.metric(v.metric)->series));
  }
  for (const auto& c : plan.composites) {
    sr.composites.emplace_back(
        c, registry.find_composite(c)->compute(output, sr.metrics,
                                               sr.validators));
  }
  return sr;
}

// Scenes are evaluated independently on up to `threads` workers; the result
// does not depend on the thread count.
inline EvaluationReport evaluate(const EvaluationPlan& plan,
                                 const std::vector<SimulationOutput>& outputs,
                                 const MetricRegistry& registry,
                                 std::size_t threads = 1) {
  check_plan(plan, registry);
  EvaluationReport report;
  if (outputs.empty()) return report;

  report.scenes.resize(outputs.size());
  parallel_for(outputs.size(), threads, [&](std::size_t i) {
    report.scenes[i] = evaluate_scene(plan, outputs[i], registry);
  });

  for (std::size_t m = 0; m < plan.metrics.size(); ++m) {
    std::vector<double> means, finals;
    for (const auto& s : report.scenes) {
      means.push_back(s.metrics[m].mean);
      finals.push_back(s.metrics[m].final_value);
    }
    report.metrics.push_back(
        {plan.metrics[m], population_stat(means), population_stat(finals)});
  }
  for (std::size_t v = 0; v < plan.validators.size(); ++v) {
    std::size_t failed = 0;
    for (const auto& s : report.scenes) failed += !s.validators[v].passed;
    report.validators.push_back(
        {plan.validators[v].name, plan.validators[v], failed});
  }
  for (std::size_t c = 0; c < plan.composites.size(); ++c) {
    std::vector<double> xs;
    for (const auto& s : report.scenes) xs.push_back(s.composites[c].second);
    report.composites.push_back({plan.composites[c], population_stat(xs)});
  }
  return report;
}

inline EvaluationReport evaluate(const EvaluationPlan& plan,
                                 const std::vector<SimulationOutput>& outputs) {
  return evaluate(plan, outputs, MetricRegistry::with_builtins());
}

}  // namespace drivegym
