// Copyright 2026 The Mentum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MENTUM_ERROR_H_
#define MENTUM_ERROR_H_

#include <stdexcept>
#include <string>

namespace mentum {

// Base for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value cannot be represented on the wire (e.g. stretch above ADC range).
class EncodingError : public Error {
 public:
  using Error::Error;
};

// Invalid profile, script, agent parameters or session configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Task state machine misuse (event before session start, incomplete session).
class TaskError : public Error {
 public:
  using Error::Error;
};

// Analytics preconditions violated (empty cell, degenerate spread, rank
// deficiency, non-positive times, inconsistent grids).
class AnalysisError : public Error {
 public:
  using Error::Error;
};

// Reading or writing logs, scripts, profiles or byte streams failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mentum

#endif  // MENTUM_ERROR_H_
