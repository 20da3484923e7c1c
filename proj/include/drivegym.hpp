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

#include "drivegym/cle.hpp"
#include "drivegym/config_io.hpp"
#include "drivegym/errors.hpp"
#include "drivegym/geometry.hpp"
#include "drivegym/kinematics.hpp"
#include "drivegym/raster.hpp"
#include "drivegym/render.hpp"
#include "drivegym/report.hpp"
#include "drivegym/reward.hpp"
#include "drivegym/scene.hpp"
#include "drivegym/scene_io.hpp"
#include "drivegym/simulation.hpp"
#include "drivegym/simulation_output.hpp"
#include "drivegym/synthetic.hpp"
#include "drivegym/types.hpp"
