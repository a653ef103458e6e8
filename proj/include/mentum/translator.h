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

#ifndef MENTUM_TRANSLATOR_H_
#define MENTUM_TRANSLATOR_H_

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mentum/control_event.h"
#include "mentum/device_link.h"
#include "mentum/one_euro.h"
#include "mentum/profile.h"

namespace mentum {

// Which task the tilt/stretch channels drive while control is engaged.
enum class ControlMode { kPointing, kArm3D };

enum class TranslatorMode { kPointing, kArm3D, kReleased };

struct FilteredFrame {
  std::uint64_t t_ms = 0;
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;
  double stretch = 0.0;
  bool button = false;
};

// Per-channel one-euro smoothing of the accelerometer and stretch cord.
// Frames whose timestamp does not advance are dropped and counted.
class Smoother {
 public:
  explicit Smoother(double min_cutoff_hz = 1.0, double beta = 0.0);

  std::optional<FilteredFrame> smooth(const SensorFrame& frame);
  void set_parameters(double min_cutoff_hz, double beta);

  std::uint64_t dropped() const { return dropped_; }
  std::optional<std::uint64_t> last_t_ms() const { return last_t_ms_; }

 private:
  std::array<OneEuroFilter, 4> filters_;
  std::optional<std::uint64_t> last_t_ms_;
  std::uint64_t dropped_ = 0;
};

struct TranslatorState {
  explicit TranslatorState(ControlMode active = ControlMode::kPointing) : active(active) {}

  ControlMode active;
  bool released = false;
  bool click_down = false;
  // Hysteresis latch: set when stretch rises above press, cleared below release.
  bool stretch_high = false;
  bool button_prev = false;
  std::optional<std::uint64_t> last_toggle_ms;
  std::uint64_t button_rising_edges = 0;
  std::uint64_t toggles = 0;

  TranslatorMode mode() const {
    if (released) return TranslatorMode::kReleased;
    return active == ControlMode::kPointing ? TranslatorMode::kPointing : TranslatorMode::kArm3D;
  }
};

// Threshold state machine. Tilt past a threshold moves the pointer at
// speed_xy; each axis is gated independently, so one PointerDelta carries
// at most speed_xy * dt per component. Comparisons are strict. Throws
// ConfigError if the profile is invalid.
std::vector<ControlEvent> translate(const CalibrationProfile& profile, TranslatorState& state,
                                    const FilteredFrame& frame, double dt_s);

// Smoother + translator with live profile replacement. A profile passed to
// set_profile takes effect at the start of the next process() call, so no
// frame is ever translated against a mix of old and new thresholds.
class Pipeline {
 public:
  explicit Pipeline(CalibrationProfile profile, ControlMode mode = ControlMode::kPointing);

  std::vector<ControlEvent> process(const SensorFrame& frame);

  void set_profile(CalibrationProfile profile);
  const CalibrationProfile& profile() const { return profile_; }
  const TranslatorState& state() const { return state_; }
  const std::optional<FilteredFrame>& last_filtered() const { return last_filtered_; }
  std::uint64_t dropped_frames() const { return smoother_.dropped(); }

 private:
  CalibrationProfile profile_;
  std::optional<CalibrationProfile> pending_;
  Smoother smoother_;
  TranslatorState state_;
  std::optional<FilteredFrame> last_filtered_;
};

}  // namespace mentum

#endif  // MENTUM_TRANSLATOR_H_
