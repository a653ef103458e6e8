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

#ifndef MENTUM_CONTROL_EVENT_H_
#define MENTUM_CONTROL_EVENT_H_

#include <cstdint>
#include <optional>
#include <string_view>

namespace mentum {

enum class EventKind { kPointerDelta, kClickPress, kClickRelease, kZDelta, kModeToggle };

std::string_view to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view name);

// Output of the translator and input of the task engine. dx/dy are pixels
// (PointerDelta), dz meters (ZDelta); unused fields stay zero.
struct ControlEvent {
  EventKind kind = EventKind::kPointerDelta;
  std::uint64_t t_ms = 0;
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;

  static ControlEvent pointer(std::uint64_t t_ms, double dx, double dy) {
    return {EventKind::kPointerDelta, t_ms, dx, dy, 0.0};
  }
  static ControlEvent z(std::uint64_t t_ms, double dz) { return {EventKind::kZDelta, t_ms, 0.0, 0.0, dz}; }
  static ControlEvent press(std::uint64_t t_ms) { return {EventKind::kClickPress, t_ms}; }
  static ControlEvent release(std::uint64_t t_ms) { return {EventKind::kClickRelease, t_ms}; }
  static ControlEvent toggle(std::uint64_t t_ms) { return {EventKind::kModeToggle, t_ms}; }

  bool is_motion() const { return kind == EventKind::kPointerDelta || kind == EventKind::kZDelta; }

  friend bool operator==(const ControlEvent&, const ControlEvent&) = default;
};

}  // namespace mentum

#endif  // MENTUM_CONTROL_EVENT_H_
