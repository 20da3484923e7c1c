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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drivegym/cle.hpp"
#include "drivegym/errors.hpp"
#include "drivegym/types.hpp"

namespace drivegym {

// Clipping threshold of the imitation reward.
inline constexpr double kDefaultRewardClip = 15.0;

struct RewardComponent {
  std::string metric;
  double weight = 1.0;
  // When set, the term is -min(value, clip) regardless of polarity.
  std::optional<double> clip;

  friend bool operator==(const RewardComponent&,
                         const RewardComponent&) = default;
};

struct RewardSpec {
  std::vector<RewardComponent> components;

  // Clipped L2 imitation reward alone.
  static RewardSpec imitation(double clip = kDefaultRewardClip) {
    return {{{L2DisplacementErrorMetric::kName, 1.0, clip}}};
  }

  void validate(const MetricRegistry& registry) const {
    for (const auto& c : components) {
      if (!std::isfinite(c.weight)) {
        throw ConfigError("reward component '" + c.metric +
                          "': weight must be finite");
      }
      if (c.clip && !(*c.clip > 0.0)) {
        throw ConfigError("reward component '" + c.metric +
                          "': clip must be > 0");
      }
      if (!registry.find_metric(c.metric)) {
        throw ConfigError("reward component '" + c.metric +
                          "': metric is not registered");
      }
    }
  }

  friend bool operator==(const RewardSpec&, const RewardSpec&) = default;
};

using FrameMetrics = std::map<std::string, double, std::less<>>;

// -min(||sim - recorded||, clip): bounded to [-clip, 0].
inline double imitation_reward(const Pose2& simulated, const Pose2& recorded,
                               double clip = kDefaultRewardClip) {
  if (!(clip > 0.0)) throw ConfigError("imitation_reward: clip must be > 0");
  return -std::min(distance(simulated.centroid, recorded.centroid), clip);
}

// Sum of weighted per-frame terms. Clipped terms contribute
// -weight * min(value, clip); unclipped ones -weight * value for costs and
// +weight * value for bonuses.
inline double compose_reward(const RewardSpec& spec, const FrameMetrics& values,
                             const MetricRegistry& registry) {
  double reward = 0.0;
  for (const auto& c : spec.components) {
    auto it = values.find(c.metric);
    if (it == values.end()) {
      throw ConfigError("compose_reward: missing metric '" + c.metric + "'");
    }
    const double v = it->second;
    if (c.clip) {
      reward += c.weight * -std::min(v, *c.clip);
      continue;
    }
    const Metric* m = registry.find_metric(c.metric);
    const Polarity p = m ? m->polarity() : Polarity::cost;
    reward += p == Polarity::cost ? -c.weight * v : c.weight * v;
  }
  return reward;
}

}  // namespace drivegym
