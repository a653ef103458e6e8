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

#ifndef MENTUM_DEVICE_SIM_H_
#define MENTUM_DEVICE_SIM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mentum/device_link.h"

namespace mentum {

enum class Interpolation { kHold, kLinearRamp };

// One piece of a gesture in sensor space. With kLinearRamp the channels move
// linearly from the previous segment's end values (zero before the first
// segment) to these targets; with kHold they jump to the targets.
struct GestureSegment {
  double duration_ms = 0.0;
  double ax = 0.0;  // milli-g
  double ay = 0.0;
  double az = 0.0;
  double stretch = 0.0;  // ADC counts
  bool button = false;
  Interpolation interpolation = Interpolation::kHold;

  friend bool operator==(const GestureSegment&, const GestureSegment&) = default;
};

struct GestureScript {
  std::vector<GestureSegment> segments;

  double total_duration_ms() const;
  friend bool operator==(const GestureScript&, const GestureScript&) = default;
};

struct NoiseModel {
  double sigma_ax = 0.0;
  double sigma_ay = 0.0;
  double sigma_az = 0.0;
  double sigma_stretch = 0.0;
  // Sinusoidal tremor added to ax and ay.
  double tremor_amplitude = 0.0;  // milli-g
  double tremor_frequency_hz = 0.0;
  double dropout_probability = 0.0;
  std::uint64_t seed = 0;
};

// Throws ConfigError when durations are not positive or targets leave the
// sensor ranges.
void validate(const GestureScript& script);
void validate(const NoiseModel& noise);

// Samples the script at rate_hz. Frame k is taken at (k + 1) / rate_hz, so the
// last frame of a segment lands on its end and reproduces its targets exactly.
// Dropped frames still consume their sequence number.
std::vector<SensorFrame> synthesize(const GestureScript& script, const NoiseModel& noise, double rate_hz);

struct WireStream {
  std::vector<std::uint8_t> bytes;
  // Indices (into the input frames) whose record was altered.
  std::vector<std::size_t> corrupted;
};

// Concatenates WireFrames. With corruption_rate > 0 each record independently,
// with that probability, has one byte replaced by a different value.
WireStream stream_over_wire(const std::vector<SensorFrame>& frames, double corruption_rate = 0.0,
                            std::uint64_t seed = 0);

// Script files: a JSON array of segment objects
//   {"duration_ms": 500, "ax": 800, "ay": 0, "az": 0, "stretch": 300,
//    "button": false, "interpolation": "hold" | "linear-ramp"}
// Only duration_ms is required; other fields default to zero/false/"hold".
GestureScript parse_script(const std::string& json_text);
std::string script_to_json(const GestureScript& script);
GestureScript load_script_file(const std::string& path);

}  // namespace mentum

#endif  // MENTUM_DEVICE_SIM_H_
