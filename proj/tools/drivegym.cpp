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

// drivegym command-line tool: gen, rollout, eval, render, raster, serve.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "drivegym/cli.hpp"

int main(int argc, char** argv) {
  using namespace drivegym::cli;

  CLI::App app{"Episodic driving simulation and closed-loop evaluation"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--scenes", gen.scenes, "Number of scenes")
      ->capture_default_str();
  gen_cmd->add_option("--frames", gen.frames, "Frames per scene")
      ->capture_default_str();
  gen_cmd->add_option("--agents", gen.agents, "Agents per frame")
      ->capture_default_str();
  gen_cmd->add_option("-o,--out", gen.out, "Output dataset file")->required();

  RolloutOptions roll;
  roll.threads = drivegym::thread_budget();
  auto* roll_cmd =
      app.add_subcommand("rollout", "Roll out a policy over every scene");
  roll_cmd->add_option("-d,--dataset", roll.dataset, "Dataset file")
      ->required();
  roll_cmd->add_option("-c,--config", roll.config, "Environment config file");
  roll_cmd
      ->add_option("-p,--policy", roll.policy,
                   "replay | zero | constant_velocity_ego")
      ->capture_default_str();
  roll_cmd->add_option("-o,--out", roll.out, "Output rollout file")
      ->required();

  EvalOptions eval;
  auto* eval_cmd =
      app.add_subcommand("eval", "Evaluate rollouts with an evaluation plan");
  eval_cmd->add_option("-i,--outputs", eval.outputs, "Rollout file")
      ->required();
  eval_cmd->add_option("-p,--plan", eval.plan,
                       "Evaluation plan file (default plan if omitted)");
  eval_cmd->add_option("-r,--report", eval.report,
                       "Report file (default: <outputs>.report.json)");

  RenderCommandOptions render;
  auto* render_cmd =
      app.add_subcommand("render", "Render one scene rollout as SVG");
  render_cmd->add_option("-i,--outputs", render.outputs, "Rollout file")
      ->required();
  render_cmd->add_option("-s,--scene-id", render.scene_id, "Scene id")
      ->required();
  render_cmd->add_option("-o,--svg", render.svg, "Output SVG file")
      ->required();
  render_cmd->add_option("-d,--dataset", render.dataset,
                         "Dataset file for map features");
  render_cmd
      ->add_option("--prediction-scale", render.prediction_scale,
                   "Scale applied to predicted displacements")
      ->capture_default_str();
  render_cmd
      ->add_option("--marker-interval", render.marker_interval,
                   "Seconds between prediction markers")
      ->capture_default_str();

  RasterOptions raster;
  auto* raster_cmd =
      app.add_subcommand("raster", "Export one observation as PGM channels");
  raster_cmd->add_option("-d,--dataset", raster.dataset, "Dataset file")
      ->required();
  raster_cmd->add_option("-c,--config", raster.config,
                         "Environment config file");
  raster_cmd->add_option("--scene-index", raster.scene_index)
      ->capture_default_str();
  raster_cmd->add_option("--frame", raster.frame)->capture_default_str();
  raster_cmd->add_option("-o,--out-dir", raster.out_dir, "Output directory")
      ->required();

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand(
      "serve", "Serve the line protocol on standard input/output");
  serve_cmd->add_option("-d,--dataset", serve.dataset, "Dataset file")
      ->required();
  serve_cmd->add_option("-c,--config", serve.config, "Environment config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (*gen_cmd) return cmd_gen(gen, std::cout, std::cerr);
  if (*roll_cmd) return cmd_rollout(roll, std::cout, std::cerr);
  if (*eval_cmd) return cmd_eval(eval, std::cout, std::cerr);
  if (*render_cmd) return cmd_render(render, std::cout, std::cerr);
  if (*raster_cmd) return cmd_raster(raster, std::cout, std::cerr);
  if (*serve_cmd) return cmd_serve(serve, std::cin, std::cout, std::cerr);
  return 1;
}
