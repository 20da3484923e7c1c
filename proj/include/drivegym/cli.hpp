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
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "drivegym/cle.hpp"
#include "drivegym/config_io.hpp"
#include "drivegym/parallel.hpp"
#include "drivegym/protocol.hpp"
#include "drivegym/raster.hpp"
#include "drivegym/render.hpp"
#include "drivegym/report.hpp"
#include "drivegym/scene_io.hpp"
#include "drivegym/simulation.hpp"
#include "drivegym/simulation_output.hpp"
#include "drivegym/synthetic.hpp"

// Implementations of the drivegym subcommands. Each returns the process exit
// status (0 success, 1 failure) and reports problems on `err`.

namespace drivegym::cli {

struct GenOptions {
  std::uint64_t seed = 0;
  std::size_t scenes = 10;
  std::size_t frames = 248;
  std::size_t agents = 5;
  std::filesystem::path out;
};

struct RolloutOptions {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> config;
  std::string policy = "replay";
  std::filesystem::path out;
  std::size_t threads = 1;
};

struct EvalOptions {
  std::filesystem::path outputs;
  std::optional<std::filesystem::path> plan;
  std::optional<std::filesystem::path> report;
};

struct RenderCommandOptions {
  std::filesystem::path outputs;
  std::string scene_id;
  std::filesystem::path svg;
  std::optional<std::filesystem::path> dataset;
  double prediction_scale = 10.0;
  double marker_interval = 2.0;
};

struct RasterOptions {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> config;
  std::size_t scene_index = 0;
  std::size_t frame = 0;
  std::filesystem::path out_dir;
};

struct ServeOptions {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> config;
};

inline const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names{"replay", "zero",
                                              "constant_velocity_ego"};
  return names;
}

inline std::optional<Policy> policy_by_name(const std::string& name) {
  if (name == "replay") return replay_policy();
  if (name == "zero") return zero_policy();
  if (name == "constant_velocity_ego") return constant_velocity_policy();
  return std::nullopt;
}

// Report path written by `eval` when none is given: next to the outputs.
inline std::filesystem::path default_report_path(
    const std::filesystem::path& outputs) {
  std::filesystem::path p = outputs;
  p.replace_extension();
  p += ".report.json";
  return p;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

inline int cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Dataset d = generate_synthetic(o.seed, o.scenes, o.frames, o.agents);
    save_dataset(d, o.out);
    out << fmt::format("wrote {} scenes to {}\n", d.scenes.size(),
                       o.out.string());
    return 0;
  });
}

// Rolls out every scene, each in a fresh environment so results do not
// depend on scheduling.
inline std::vector<SimulationOutput> rollout_all(
    std::shared_ptr<const Dataset> dataset, const EnvConfig& config,
    const Policy& policy, std::size_t threads) {
  auto registry = std::make_shared<const MetricRegistry>(
      MetricRegistry::with_builtins());
  std::vector<SimulationOutput> outputs(dataset->scenes.size());
  parallel_for(outputs.size(), threads, [&](std::size_t i) {
    Environment env(dataset, config, registry);
    outputs[i] = rollout(env, policy, i);
  });
  return outputs;
}

inline int cmd_rollout(const RolloutOptions& o, std::ostream& out,
                       std::ostream& err) {
  const auto policy = policy_by_name(o.policy);
  if (!policy) {
    err << "error: unknown policy '" << o.policy << "' (expected one of:";
    for (const auto& n : policy_names()) err << ' ' << n;
    err << ")\n";
    return 1;
  }
  return guarded(err, [&] {
    auto dataset = std::make_shared<const Dataset>(load_dataset(o.dataset));
    const EnvConfig config = o.config ? load_env_config(*o.config) : EnvConfig{};
    const auto outputs = rollout_all(dataset, config, *policy, o.threads);
    save_outputs(outputs, o.out);
    out << fmt::format("rolled out {} scenes with policy '{}' to {}\n",
                       outputs.size(), o.policy, o.out.string());
    return 0;
  });
}

inline int cmd_eval(const EvalOptions& o, std::ostream& out,
                    std::ostream& err) {
  return guarded(err, [&] {
    const EvaluationPlan plan =
        o.plan ? load_plan(*o.plan) : EvaluationPlan::default_plan();
    const auto outputs = load_outputs(o.outputs);
    const EvaluationReport report = evaluate(
        plan, outputs, MetricRegistry::with_builtins(), thread_budget());
    const auto report_path = o.report ? *o.report
                                      : default_report_path(o.outputs);
    write_text_file(report_path, to_json(report).dump(1) + "\n");
    out << format_report(report);
    out << "report written to " << report_path.string() << '\n';
    return 0;
  });
}

inline int cmd_render(const RenderCommandOptions& o, std::ostream& out,
                      std::ostream& err) {
  return guarded(err, [&] {
    const auto outputs = load_outputs(o.outputs);
    const SimulationOutput* found = nullptr;
    for (const auto& so : outputs) {
      if (so.scene_id == o.scene_id) found = &so;
    }
    if (!found) throw ConfigError("unknown scene '" + o.scene_id + "'");
    std::optional<Dataset> dataset;
    if (o.dataset) dataset = load_dataset(*o.dataset);
    const std::string svg =
        render_svg(*found, dataset ? &dataset->map : nullptr,
                   {o.prediction_scale, o.marker_interval});
    write_text_file(o.svg, svg);
    out << "wrote " << o.svg.string() << '\n';
    return 0;
  });
}

// Binary PGM (P5) with values scaled to 0..255.
inline std::string to_pgm(const Raster& r, int channel) {
  std::string s = fmt::format("P5\n{} {}\n255\n", r.width, r.height);
  for (float v : r.channel(channel)) {
    s.push_back(static_cast<char>(
        static_cast<unsigned char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255))));
  }
  return s;
}

inline int cmd_raster(const RasterOptions& o, std::ostream& out,
                      std::ostream& err) {
  return guarded(err, [&] {
    const Dataset d = load_dataset(o.dataset);
    const EnvConfig config = o.config ? load_env_config(*o.config) : EnvConfig{};
    config.raster.validate();
    if (o.scene_index >= d.scenes.size()) {
      throw ConfigError("scene index out of range");
    }
    const Raster r =
        rasterize(d.map, d.scenes[o.scene_index], o.frame, config.raster);
    if (!std::filesystem::is_directory(o.out_dir)) {
      throw IoError("output directory '" + o.out_dir.string() +
                    "' does not exist");
    }
    for (int c = 0; c < r.channels; ++c) {
      write_text_file(o.out_dir / fmt::format("channel_{:02}.pgm", c),
                      to_pgm(r, c));
    }
    out << fmt::format("wrote {} channels ({}x{}) to {}\n", r.channels,
                       r.width, r.height, o.out_dir.string());
    return 0;
  });
}

inline int cmd_serve(const ServeOptions& o, std::istream& in,
                     std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto dataset = std::make_shared<const Dataset>(load_dataset(o.dataset));
    const EnvConfig config = o.config ? load_env_config(*o.config) : EnvConfig{};
    Environment env(dataset, config);
    serve(env, in, out);
    return 0;
  });
}

}  // namespace drivegym::cli
