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

// Session logs: JSON-lines, one object per line.
//
//   {"record":"header","schema_version":1,"session_id":...,"mode":...,
//    "profile":{...},"pointing":{...}|"arm":{...},...}
//   {"record":"trial2d",...} or {"record":"trial3d",...}   one per trial
//   {"record":"calibration","t":..,"after_trials":..,"profile":{...}}
//   {"record":"end","trials":N,"complete":true|false}
//
// Lines are flushed as they are written, so a log cut short by a crash is a
// valid prefix: it reads back as a partial session.
//
// Event tapes use the same framing: {"record":"tape_header",...} followed by
// one line per ControlEvent ({"t":..,"kind":"pointer_delta","dx":..,"dy":..})
// or clock tick ({"t":..,"kind":"tick"}).

#ifndef MENTUM_SESSION_LOG_H_
#define MENTUM_SESSION_LOG_H_

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mentum/control_event.h"
#include "mentum/profile.h"
#include "mentum/task_engine.h"

namespace mentum {

inline constexpr int kSchemaVersion = 1;

enum class SessionMode { kPointing, kArm3D, kCalibrationOnly };

std::string_view to_string(SessionMode mode);
SessionMode session_mode_from_string(std::string_view name);

struct SessionHeader {
  int schema_version = kSchemaVersion;
  std::string session_id;
  std::string cohort = "default";
  std::string participant;
  SessionMode mode = SessionMode::kPointing;
  std::string source;
  CalibrationProfile profile;
  PointingConfig pointing;
  ArmConfig arm;

  friend bool operator==(const SessionHeader&, const SessionHeader&) = default;
};

// A profile swapped in mid-session. after_trials counts the trials logged
// before the change, which fixes its position among the trial lines.
struct CalibrationChange {
  std::uint64_t t_ms = 0;
  std::size_t after_trials = 0;
  CalibrationProfile profile;
  friend bool operator==(const CalibrationChange&, const CalibrationChange&) = default;
};

struct SessionLog {
  SessionHeader header;
  std::vector<TrialRecord2D> pointing_trials;
  std::vector<TrialRecord3D> arm_trials;
  std::vector<CalibrationChange> calibrations;
  bool complete = false;
  // Set when the final line was cut mid-record.
  bool truncated_tail = false;

  std::size_t trial_count() const { return pointing_trials.size() + arm_trials.size(); }
};

std::string header_line(const SessionHeader& header);
std::string trial_line(const TrialRecord2D& trial);
std::string trial_line(const TrialRecord3D& trial);
std::string calibration_line(const CalibrationChange& change);
std::string end_line(std::size_t trials, bool complete);

// Whole-log serialization; identical logs produce identical bytes.
std::string serialize(const SessionLog& log);

// Throws IoError when the header is missing or a complete line is malformed.
SessionLog parse_session_log(const std::string& text);
SessionLog read_session_log(const std::string& path);

// Checks task invariants on a parsed log (positive selection times, success
// clicks inside the target, dwell >= 2 s, bounded positions, trial counts for
// complete sessions). Returns the list of violations.
std::vector<std::string> check_log(const SessionLog& log);

// Append-only writer; each line is flushed before the call returns.
class SessionLogWriter {
 public:
  SessionLogWriter(const std::string& path, const SessionHeader& header);
  ~SessionLogWriter();
  SessionLogWriter(const SessionLogWriter&) = delete;
  SessionLogWriter& operator=(const SessionLogWriter&) = delete;

  void append(const TrialRecord2D& trial);
  void append(const TrialRecord3D& trial);
  void append(const CalibrationChange& change);
  void finish(bool complete);

 private:
  void write_line(const std::string& line);

  std::FILE* file_ = nullptr;
  std::string path_;
  std::size_t trials_ = 0;
  bool finished_ = false;
};

struct Tick {
  std::uint64_t t_ms = 0;
  friend bool operator==(const Tick&, const Tick&) = default;
};

using TapeEntry = std::variant<ControlEvent, Tick>;

struct EventTape {
  SessionHeader header;
  std::uint64_t start_t_ms = 0;
  std::vector<TapeEntry> entries;
};

std::string serialize(const EventTape& tape);
EventTape parse_event_tape(const std::string& text);

// Re-runs the task engine over a tape.
SessionLog replay(const EventTape& tape);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mentum

#endif  // MENTUM_SESSION_LOG_H_
