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

#include <stdexcept>
#include <string>

namespace drivegym {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. The message carries the line/field locus.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A type invariant does not hold. `field` names the offending field path,
// e.g. "scenes[2].dt".
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Misuse of the reset/step lifecycle.
class EpisodeError : public Error {
 public:
  using Error::Error;
};

// Evaluation plan is not dependency-closed, names an unknown metric, or a
// metric failed on a scene.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace drivegym
