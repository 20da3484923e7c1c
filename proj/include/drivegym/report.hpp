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
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "drivegym/cle.hpp"
#include "drivegym/config_io.hpp"

namespace drivegym {

// Four significant digits for human-readable output.
inline std::string format_value(double v) { return fmt::format("{:.4g}", v); }

inline std::string format_stat(const Stat& s) {
  return format_value(s.mean) + " (" + format_value(s.stddev) + ")";
}

inline std::string validator_label(const Validator& v) {
  return fmt::format("{} ({} {})", v.name, symbol(v.comparison),
                     format_value(v.threshold));
}

// Machine-readable report; keeps full precision.
inline nlohmann::ordered_json to_json(const EvaluationReport& r) {
  using ojson = nlohmann::ordered_json;
  const auto stat = [](const Stat& s) {
    ojson j = ojson::object();
    j["mean"] = s.mean;
    j["std"] = s.stddev;
    return j;
  };
  ojson metrics = ojson::array();
  for (const auto& m : r.metrics) {
    ojson j = ojson::object();
    j["name"] = m.name;
    j["mean"] = stat(m.mean);
    j["final"] = stat(m.final_value);
    metrics.push_back(std::move(j));
  }
  ojson validators = ojson::array();
  for (const auto& v : r.validators) {
    ojson j = to_json(v.validator);
    j["failed_scenes"] = v.failed_scenes;
    validators.push_back(std::move(j));
  }
  ojson composites = ojson::array();
  for (const auto& c : r.composites) {
    ojson j = ojson::object();
    j["name"] = c.name;
    j["value"] = stat(c.value);
    composites.push_back(std::move(j));
  }
  ojson scenes = ojson::array();
  for (const auto& s : r.scenes) {
    ojson sm = ojson::array();
    for (const auto& m : s.metrics) {
      ojson j = ojson::object();
      j["name"] = m.name;
      j["mean"] = m.mean;
      j["final"] = m.final_value;
      sm.push_back(std::move(j));
    }
    ojson sv = ojson::array();
    for (const auto& v : s.validators) {
      ojson j = ojson::object();
      j["name"] = v.name;
      j["passed"] = v.passed;
      j["value"] = v.value;
      sv.push_back(std::move(j));
    }
    ojson sc = ojson::array();
    for (const auto& [name, value] : s.composites) {
      ojson j = ojson::object();
      j["name"] = name;
      j["value"] = value;
      sc.push_back(std::move(j));
    }
    ojson j = ojson::object();
    j["scene_id"] = s.scene_id;
    j["metrics"] = std::move(sm);
    j["validators"] = std::move(sv);
    j["composites"] = std::move(sc);
    scenes.push_back(std::move(j));
  }
  ojson aggregate = ojson::object();
  aggregate["metrics"] = std::move(metrics);
  aggregate["validators"] = std::move(validators);
  aggregate["composites"] = std::move(composites);
  ojson j = ojson::object();
  j["scene_count"] = r.scenes.size();
  j["aggregate"] = std::move(aggregate);
  j["scenes"] = std::move(scenes);
  return j;
}

namespace report_detail {

inline std::string metric_label(const std::string& name, bool final_value) {
  if (name == L2DisplacementErrorMetric::kName) {
    return final_value ? "Final Displacement" : "Average Displacement";
  }
  return final_value ? name + " (final)" : name;
}

inline void append_row(std::string& out, const std::vector<std::string>& cells,
                       const std::vector<std::size_t>& widths) {
  out += "|";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out += fmt::format(" {:<{}} |", cells[i], widths[i]);
  }
  out += "\n";
}

inline std::string table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> widths(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    widths[i] = header[i].size();
    for (const auto& r : rows) widths[i] = std::max(widths[i], r[i].size());
  }
  std::string out;
  append_row(out, header, widths);
  out += "|";
  for (auto w : widths) out += std::string(w + 2, '-') + "|";
  out += "\n";
  for (const auto& r : rows) append_row(out, r, widths);
  return out;
}

}  // namespace report_detail

// Summary table: metric columns as "average (std. deviation)" over scenes,
// validator columns as failed-scene counts, then composites. A per-scene
// breakdown follows.
inline std::string format_report(const EvaluationReport& r) {
  using report_detail::metric_label;
  std::string out = fmt::format("Closed-loop evaluation: {} scene(s)\n",
                                r.scenes.size());
  if (r.empty()) return out;

  std::vector<std::string> header;
  std::vector<std::string> row;
  for (const auto& m : r.metrics) {
    header.push_back(metric_label(m.name, false));
    row.push_back(format_stat(m.mean));
    if (m.name == L2DisplacementErrorMetric::kName) {
      header.push_back(metric_label(m.name, true));
      row.push_back(format_stat(m.final_value));
    }
  }
  for (const auto& v : r.validators) {
    header.push_back(validator_label(v.validator));
    row.push_back(std::to_string(v.failed_scenes));
  }
  for (const auto& c : r.composites) {
    header.push_back(c.name);
    row.push_back(format_stat(c.value));
  }
  out += "\nMetrics: average (std. deviation). Validators: failed scenes.\n";
  out += report_detail::table(header, {row});

  std::vector<std::string> scene_header{"scene"};
  for (const auto& m : r.metrics) {
    scene_header.push_back(metric_label(m.name, false));
    if (m.name == L2DisplacementErrorMetric::kName) {
      scene_header.push_back(metric_label(m.name, true));
    }
  }
  for (const auto& v : r.validators) scene_header.push_back(v.name);
  for (const auto& c : r.composites) scene_header.push_back(c.name);
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : r.scenes) {
    std::vector<std::string> cells{s.scene_id};
    for (const auto& m : s.metrics) {
      cells.push_back(format_value(m.mean));
      if (m.name == L2DisplacementErrorMetric::kName) {
        cells.push_back(format_value(m.final_value));
      }
    }
    for (const auto& v : s.validators) {
      cells.push_back(v.passed ? "pass" : "FAIL");
    }
    for (const auto& c : s.composites) cells.push_back(format_value(c.second));
    rows.push_back(std::move(cells));
  }
  out += "\nPer scene:\n";
  out += report_detail::table(scene_header, rows);
  return out;
}

}  // namespace drivegym
