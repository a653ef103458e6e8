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

#include "mentum/session_log.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "json_codec.h"
#include "mentum/error.h"

namespace mentum {

using nlohmann::json;

json to_json(Vec2 v) { return json::array({v.x, v.y}); }
json to_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }
Vec2 vec2(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }
Vec3 vec3(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json profile_json(const CalibrationProfile& p) {
  json values = json::object();
  for (std::string_view key : profile_keys()) values[std::string(key)] = profile_value(p, key);
  json extra = json::array();
  for (const auto& [k, v] : p.extra) extra.push_back(json::array({k, v}));
  return {{"values", values}, {"extra", extra}};
}

CalibrationProfile profile_from_json(const json& j) {
  std::string text;
  for (const auto& [key, value] : j.at("values").items()) {
    text += key + "=" + json(value.get<double>()).dump() + "\n";
  }
  for (const auto& kv : j.at("extra")) text += kv.at(0).get<std::string>() + "=" + kv.at(1).get<std::string>() + "\n";
  return load_profile(text);
}

json event_json(const ControlEvent& e) {
  json j = {{"t", e.t_ms}, {"kind", std::string(to_string(e.kind))}};
  if (e.kind == EventKind::kPointerDelta) {
    j["dx"] = e.dx;
    j["dy"] = e.dy;
  } else if (e.kind == EventKind::kZDelta) {
    j["dz"] = e.dz;
  }
  return j;
}

namespace {

std::string sphere_name(Sphere s) { return s == Sphere::kTarget ? "target" : "start"; }

TrialRecord2D trial2d_from_json(const json& j) {
  TrialRecord2D t;
  t.index = j.at("index").get<int>();
  t.run = j.at("run").get<int>();
  const json& target = j.at("target");
  t.target = {target.at("angle").get<int>(), target.at("width").get<double>(), target.at("distance").get<double>(),
              target.at("center").get<bool>()};
  t.target_pos = vec2(j.at("target_pos"));
  t.start_pos = vec2(j.at("start_pos"));
  t.end_pos = vec2(j.at("end_pos"));
  t.onset_t = j.at("onset_t").get<std::uint64_t>();
  t.success_click_t = j.at("success_click_t").get<std::uint64_t>();
  for (const auto& m : j.at("misclicks")) {
    t.misclicks.push_back({{m.at(1).get<double>(), m.at(2).get<double>()}, m.at(0).get<std::uint64_t>()});
  }
  for (const auto& s : j.at("path")) {
    t.path.push_back({s.at(0).get<std::uint64_t>(), {s.at(1).get<double>(), s.at(2).get<double>()}});
  }
  return t;
}

TrialRecord3D trial3d_from_json(const json& j) {
  TrialRecord3D t;
  t.index = j.at("index").get<int>();
  t.practice = j.at("practice").get<bool>();
  t.target = vec3(j.at("target"));
  t.onset_t = j.at("onset_t").get<std::uint64_t>();
  for (const auto& c : j.at("crossings")) {
    t.crossings.push_back({c.at(0).get<std::uint64_t>(),
                           c.at(1).get<std::string>() == "target" ? Sphere::kTarget : Sphere::kStart,
                           c.at(2).get<bool>()});
  }
  t.outbound_dwell_t = j.at("outbound_dwell_t").get<std::uint64_t>();
  t.return_dwell_t = j.at("return_dwell_t").get<std::uint64_t>();
  return t;
}

SessionHeader header_from_json(const json& j) {
  SessionHeader h;
  h.schema_version = j.at("schema_version").get<int>();
  if (h.schema_version != kSchemaVersion) {
    throw IoError("unsupported schema_version " + std::to_string(h.schema_version));
  }
  h.session_id = j.at("session_id").get<std::string>();
  h.cohort = j.at("cohort").get<std::string>();
  h.participant = j.at("participant").get<std::string>();
  h.mode = session_mode_from_string(j.at("mode").get<std::string>());
  h.source = j.at("source").get<std::string>();
  h.profile = profile_from_json(j.at("profile"));
  const json& p = j.at("pointing");
  h.pointing.screen = {p.at("screen_width").get<double>(), p.at("screen_height").get<double>()};
  h.pointing.runs = p.at("runs").get<int>();
  h.pointing.trials_per_run = p.at("trials_per_run").get<int>();
  h.pointing.seed = p.at("seed").get<std::uint64_t>();
  const json& a = j.at("arm");
  h.arm.trials = a.at("trials").get<int>();
  h.arm.gain_m_per_px = a.at("gain_m_per_px").get<double>();
  h.arm.start = vec3(a.at("start"));
  h.arm.seed = a.at("seed").get<std::uint64_t>();
  return h;
}

json header_json(const SessionHeader& h) {
  return {{"record", "header"},
          {"schema_version", h.schema_version},
          {"session_id", h.session_id},
          {"cohort", h.cohort},
          {"participant", h.participant},
          {"mode", std::string(to_string(h.mode))},
          {"source", h.source},
          {"profile", profile_json(h.profile)},
          {"pointing",
           {{"screen_width", h.pointing.screen.width},
            {"screen_height", h.pointing.screen.height},
            {"runs", h.pointing.runs},
            {"trials_per_run", h.pointing.trials_per_run},
            {"seed", h.pointing.seed}}},
          {"arm",
           {{"trials", h.arm.trials},
            {"gain_m_per_px", h.arm.gain_m_per_px},
            {"start", to_json(h.arm.start)},
            {"seed", h.arm.seed}}}};
}

// Splits into lines; reports whether the final line lacked a newline.
std::vector<std::string> lines_of(const std::string& text, bool& unterminated) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  unterminated = !text.empty() && text.back() != '\n';
  return lines;
}

}  // namespace

std::string_view to_string(SessionMode mode) {
  switch (mode) {
    case SessionMode::kPointing: return "pointing";
    case SessionMode::kArm3D: return "arm3d";
    case SessionMode::kCalibrationOnly: return "calibration";
  }
  return "unknown";
}

SessionMode session_mode_from_string(std::string_view name) {
  if (name == "pointing") return SessionMode::kPointing;
  if (name == "arm3d") return SessionMode::kArm3D;
  if (name == "calibration") return SessionMode::kCalibrationOnly;
  throw IoError("unknown session mode " + std::string(name));
}

std::string header_line(const SessionHeader& header) { return header_json(header).dump(); }

std::string trial_line(const TrialRecord2D& t) {
  json misclicks = json::array();
  for (const auto& m : t.misclicks) misclicks.push_back(json::array({m.t_ms, m.pos.x, m.pos.y}));
  json path = json::array();
  for (const auto& s : t.path) path.push_back(json::array({s.t_ms, s.pos.x, s.pos.y}));
  const json j = {{"record", "trial2d"},
                  {"index", t.index},
                  {"run", t.run},
                  {"target",
                   {{"angle", t.target.angle_deg},
                    {"width", t.target.width},
                    {"distance", t.target.distance},
                    {"center", t.target.is_center}}},
                  {"target_pos", to_json(t.target_pos)},
                  {"start_pos", to_json(t.start_pos)},
                  {"end_pos", to_json(t.end_pos)},
                  {"onset_t", t.onset_t},
                  {"success_click_t", t.success_click_t},
                  {"selection_time_s", t.selection_time_s()},
                  {"misclicks", misclicks},
                  {"path", path}};
  return j.dump();
}

std::string trial_line(const TrialRecord3D& t) {
  json crossings = json::array();
  for (const auto& c : t.crossings) crossings.push_back(json::array({c.t_ms, sphere_name(c.sphere), c.entered}));
  const json j = {{"record", "trial3d"},
                  {"index", t.index},
                  {"practice", t.practice},
                  {"target", to_json(t.target)},
                  {"onset_t", t.onset_t},
                  {"crossings", crossings},
                  {"outbound_dwell_t", t.outbound_dwell_t},
                  {"return_dwell_t", t.return_dwell_t},
                  {"completion_time_s", t.completion_time_s()}};
  return j.dump();
}

std::string calibration_line(const CalibrationChange& change) {
  return json{{"record", "calibration"},
              {"t", change.t_ms},
              {"after_trials", change.after_trials},
              {"profile", profile_json(change.profile)}}
      .dump();
}

std::string end_line(std::size_t trials, bool complete) {
  return json{{"record", "end"}, {"trials", trials}, {"complete", complete}}.dump();
}

std::string serialize(const SessionLog& log) {
  std::string out = header_line(log.header) + "\n";
  std::size_t written = 0;
  std::size_t next_change = 0;
  auto changes_upto = [&](std::size_t trials) {
    while (next_change < log.calibrations.size() && log.calibrations[next_change].after_trials <= trials) {
      out += calibration_line(log.calibrations[next_change++]) + "\n";
    }
  };
  for (const auto& t : log.pointing_trials) {
    changes_upto(written++);
    out += trial_line(t) + "\n";
  }
  for (const auto& t : log.arm_trials) {
    changes_upto(written++);
    out += trial_line(t) + "\n";
  }
  changes_upto(static_cast<std::size_t>(-1));
  out += end_line(log.trial_count(), log.complete) + "\n";
  return out;
}

SessionLog parse_session_log(const std::string& text) {
  bool unterminated = false;
  std::vector<std::string> lines = lines_of(text, unterminated);
  SessionLog log;
  bool have_header = false;
  bool have_end = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::parse_error&) {
      if (i + 1 == lines.size() && unterminated) {
        log.truncated_tail = true;
        break;
      }
      throw IoError("session log line " + std::to_string(i + 1) + " is not valid JSON");
    }
    try {
      const std::string kind = j.at("record").get<std::string>();
      if (!have_header) {
        if (kind != "header") throw IoError("session log does not start with a header record");
        log.header = header_from_json(j);
        have_header = true;
      } else if (kind == "trial2d") {
        log.pointing_trials.push_back(trial2d_from_json(j));
      } else if (kind == "trial3d") {
        log.arm_trials.push_back(trial3d_from_json(j));
      } else if (kind == "calibration") {
        log.calibrations.push_back({j.at("t").get<std::uint64_t>(), j.at("after_trials").get<std::size_t>(),
                                    profile_from_json(j.at("profile"))});
      } else if (kind == "end") {
        have_end = true;
        log.complete = j.at("complete").get<bool>();
      } else {
        throw IoError("unknown record kind " + kind);
      }
    } catch (const json::exception& e) {
      throw IoError("session log line " + std::to_string(i + 1) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw IoError("session log line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (!have_header) throw IoError("session log has no header");
  if (!have_end) log.complete = false;
  return log;
}

SessionLog read_session_log(const std::string& path) { return parse_session_log(read_text_file(path)); }

std::vector<std::string> check_log(const SessionLog& log) {
  std::vector<std::string> problems;
  const auto& h = log.header;
  for (const auto& t : log.pointing_trials) {
    const std::string where = "trial " + std::to_string(t.index) + ": ";
    if (!(t.selection_time_s() > 0.0) || t.success_click_t < t.onset_t) problems.push_back(where + "non-positive selection time");
    if (!inside_disk(t.end_pos, t.target_pos, t.target.width)) problems.push_back(where + "success click outside target");
    for (const auto& s : t.path) {
      if (s.pos.x < 0 || s.pos.y < 0 || s.pos.x > h.pointing.screen.width || s.pos.y > h.pointing.screen.height) {
        problems.push_back(where + "pointer left the screen");
        break;
      }
    }
  }
  for (const auto& t : log.arm_trials) {
    const std::string where = "trial " + std::to_string(t.index) + ": ";
    if (t.outbound_dwell_t < t.onset_t + kDwellMs || t.return_dwell_t < t.outbound_dwell_t + kDwellMs) {
      problems.push_back(where + "dwell shorter than 2 s");
    }
    if (t.practice != (t.index == 0)) problems.push_back(where + "practice flag must mark trial 1 only");
  }
  if (log.complete) {
    if (h.mode == SessionMode::kPointing &&
        static_cast<int>(log.pointing_trials.size()) != h.pointing.runs * h.pointing.trials_per_run) {
      problems.push_back("complete pointing session has wrong trial count");
    }
    if (h.mode == SessionMode::kArm3D && static_cast<int>(log.arm_trials.size()) != h.arm.trials) {
      problems.push_back("complete arm session has wrong trial count");
    }
  }
  return problems;
}

SessionLogWriter::SessionLogWriter(const std::string& path, const SessionHeader& header)
    : file_(std::fopen(path.c_str(), "wb")), path_(path) {
  if (file_ == nullptr) throw IoError("cannot open log " + path + " for writing");
  write_line(header_line(header));
}

SessionLogWriter::~SessionLogWriter() {
  if (file_ != nullptr) std::fclose(file_);
}

void SessionLogWriter::write_line(const std::string& line) {
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fputc('\n', file_) == EOF ||
      std::fflush(file_) != 0) {
    throw IoError("write failed on log " + path_);
  }
}

void SessionLogWriter::append(const TrialRecord2D& trial) {
  write_line(trial_line(trial));
  ++trials_;
}

void SessionLogWriter::append(const TrialRecord3D& trial) {
  write_line(trial_line(trial));
  ++trials_;
}

void SessionLogWriter::append(const CalibrationChange& change) { write_line(calibration_line(change)); }

void SessionLogWriter::finish(bool complete) {
  if (finished_) return;
  write_line(end_line(trials_, complete));
  finished_ = true;
}

std::string serialize(const EventTape& tape) {
  json head = header_json(tape.header);
  head["record"] = "tape_header";
  head["start_t"] = tape.start_t_ms;
  std::string out = head.dump() + "\n";
  for (const auto& entry : tape.entries) {
    if (const auto* e = std::get_if<ControlEvent>(&entry)) {
      out += event_json(*e).dump() + "\n";
    } else {
      out += json{{"t", std::get<Tick>(entry).t_ms}, {"kind", "tick"}}.dump() + "\n";
    }
  }
  return out;
}

EventTape parse_event_tape(const std::string& text) {
  bool unterminated = false;
  const std::vector<std::string> lines = lines_of(text, unterminated);
  if (lines.empty()) throw IoError("empty event tape");
  EventTape tape;
  try {
    const json head = json::parse(lines.front());
    if (head.at("record").get<std::string>() != "tape_header") throw IoError("event tape lacks a tape_header");
    tape.header = header_from_json(head);
    tape.start_t_ms = head.at("start_t").get<std::uint64_t>();
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const json j = json::parse(lines[i]);
      const std::uint64_t t = j.at("t").get<std::uint64_t>();
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "tick") {
        tape.entries.emplace_back(Tick{t});
        continue;
      }
      const auto k = event_kind_from_string(kind);
      if (!k) throw IoError("unknown event kind " + kind);
      ControlEvent e{*k, t};
      e.dx = j.value("dx", 0.0);
      e.dy = j.value("dy", 0.0);
      e.dz = j.value("dz", 0.0);
      tape.entries.emplace_back(e);
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed event tape: ") + e.what());
  }
  return tape;
}

SessionLog replay(const EventTape& tape) {
  SessionLog log;
  log.header = tape.header;
  if (tape.header.mode == SessionMode::kPointing) {
    PointingTask task(tape.header.pointing);
    task.start(tape.start_t_ms);
    for (const auto& entry : tape.entries) {
      if (const auto* e = std::get_if<ControlEvent>(&entry)) {
        if (auto r = task.step(*e)) log.pointing_trials.push_back(std::move(*r));
      }
    }
    log.complete = task.finished();
  } else if (tape.header.mode == SessionMode::kArm3D) {
    ArmTask task(tape.header.arm);
    task.start(tape.start_t_ms);
    for (const auto& entry : tape.entries) {
      std::optional<TrialRecord3D> r;
      if (const auto* e = std::get_if<ControlEvent>(&entry)) {
        r = task.step(*e);
      } else {
        r = task.advance(std::get<Tick>(entry).t_ms);
      }
      if (r) log.arm_trials.push_back(std::move(*r));
    }
    log.complete = task.finished();
  } else {
    log.complete = true;
  }
  return log;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace mentum
