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

#include "mentum/translator.h"

#include "mentum/error.h"

namespace mentum {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kPointerDelta: return "pointer_delta";
    case EventKind::kClickPress: return "click_press";
    case EventKind::kClickRelease: return "click_release";
    case EventKind::kZDelta: return "z_delta";
    case EventKind::kModeToggle: return "mode_toggle";
  }
  return "unknown";
}

std::optional<EventKind> event_kind_from_string(std::string_view name) {
  for (EventKind k : {EventKind::kPointerDelta, EventKind::kClickPress, EventKind::kClickRelease,
                      EventKind::kZDelta, EventKind::kModeToggle}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

Smoother::Smoother(double min_cutoff_hz, double beta) {
  for (auto& f : filters_) f = OneEuroFilter(min_cutoff_hz, beta);
}

void Smoother::set_parameters(double min_cutoff_hz, double beta) {
  for (auto& f : filters_) f.set_parameters(min_cutoff_hz, beta);
}

std::optional<FilteredFrame> Smoother::smooth(const SensorFrame& frame) {
  double dt = 0.0;
  if (last_t_ms_) {
    if (frame.t_ms <= *last_t_ms_) {
      ++dropped_;
      return std::nullopt;
    }
    dt = static_cast<double>(frame.t_ms - *last_t_ms_) / 1000.0;
  }
  last_t_ms_ = frame.t_ms;

  FilteredFrame out;
  out.t_ms = frame.t_ms;
  out.ax = filters_[0].filter(frame.ax, dt);
  out.ay = filters_[1].filter(frame.ay, dt);
  out.az = filters_[2].filter(frame.az, dt);
  out.stretch = filters_[3].filter(frame.stretch, dt);
  out.button = frame.button;
  return out;
}

std::vector<ControlEvent> translate(const CalibrationProfile& profile, TranslatorState& state,
                                    const FilteredFrame& frame, double dt_s) {
  validate(profile);
  std::vector<ControlEvent> events;
  const std::uint64_t t = frame.t_ms;

  if (frame.button && !state.button_prev) {
    ++state.button_rising_edges;
    const bool debounced =
        !state.last_toggle_ms || static_cast<double>(t - *state.last_toggle_ms) >= profile.debounce_ms;
    if (debounced) {
      state.last_toggle_ms = t;
      ++state.toggles;
      state.released = !state.released;
      if (state.released && state.click_down) {
        state.click_down = false;
        events.push_back(ControlEvent::release(t));
      }
      events.push_back(ControlEvent::toggle(t));
    }
  }
  state.button_prev = frame.button;

  bool rose = false;
  bool fell = false;
  if (!state.stretch_high && frame.stretch > profile.stretch_press) {
    state.stretch_high = true;
    rose = true;
  } else if (state.stretch_high && frame.stretch < profile.stretch_release) {
    state.stretch_high = false;
    fell = true;
  }

  if (state.released) return events;

  if (dt_s > 0.0) {
    const double step = profile.speed_xy * dt_s;
    double dx = 0.0;
    double dy = 0.0;
    if (frame.ax > profile.tilt_pos_x) dx = step;
    else if (frame.ax < profile.tilt_neg_x) dx = -step;
    if (frame.ay > profile.tilt_pos_y) dy = step;
    else if (frame.ay < profile.tilt_neg_y) dy = -step;
    if (dx != 0.0 || dy != 0.0) events.push_back(ControlEvent::pointer(t, dx, dy));
  }

  if (state.active == ControlMode::kPointing) {
    if (rose && !state.click_down) {
      state.click_down = true;
      events.push_back(ControlEvent::press(t));
    } else if (fell && state.click_down) {
      state.click_down = false;
      events.push_back(ControlEvent::release(t));
    }
  } else if (dt_s > 0.0) {
    const double step = profile.speed_z * dt_s;
    if (state.stretch_high) {
      events.push_back(ControlEvent::z(t, step));
    } else if (frame.stretch < profile.stretch_press_down) {
      events.push_back(ControlEvent::z(t, -step));
    }
  }
  return events;
}

Pipeline::Pipeline(CalibrationProfile profile, ControlMode mode)
    : profile_(std::move(profile)),
      smoother_(profile_.filter_min_cutoff, profile_.filter_beta),
      state_(mode) {
  validate(profile_);
}

void Pipeline::set_profile(CalibrationProfile profile) {
  validate(profile);
  pending_ = std::move(profile);
}

std::vector<ControlEvent> Pipeline::process(const SensorFrame& frame) {
  if (pending_) {
    profile_ = std::move(*pending_);
    pending_.reset();
    smoother_.set_parameters(profile_.filter_min_cutoff, profile_.filter_beta);
  }
  const std::optional<std::uint64_t> previous = smoother_.last_t_ms();
  std::optional<FilteredFrame> filtered = smoother_.smooth(frame);
  if (!filtered) return {};
  const double dt = previous ? static_cast<double>(filtered->t_ms - *previous) / 1000.0 : 0.0;
  last_filtered_ = filtered;
  return translate(profile_, state_, *filtered, dt);
}

}  // namespace mentum
