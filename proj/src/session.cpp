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

#include "mentum/session.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <thread>

#include "json.hpp"

#include "json_codec.h"
#include "mentum/error.h"

namespace mentum {

using nlohmann::json;

namespace {

constexpr std::string_view kSourceNames[] = {"agent", "sensor-agent", "script", "capture", "serial"};
constexpr std::string_view kMessageNames[] = {"hello", "trace",  "calib_ack", "calib_reject",
                                              "task_state", "event", "trial", "session_end"};

std::string_view mode_name(TranslatorMode m) {
  switch (m) {
    case TranslatorMode::kPointing: return "pointing";
    case TranslatorMode::kArm3D: return "arm3d";
    case TranslatorMode::kReleased: return "released";
  }
  return "pointing";
}

std::int64_t wall_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::string_view to_string(SourceKind kind) { return kSourceNames[static_cast<int>(kind)]; }

SourceKind source_kind_from_string(std::string_view name) {
  for (int i = 0; i < 5; ++i) {
    if (kSourceNames[i] == name) return static_cast<SourceKind>(i);
  }
  throw ConfigError("unknown source '" + std::string(name) + "'");
}

std::string_view to_string(MessageType type) { return kMessageNames[static_cast<int>(type)]; }

void validate(const SessionConfig& c) {
  if (!(c.rate_hz >= kMinStreamRateHz && c.rate_hz <= kMaxStreamRateHz)) {
    throw ConfigError("stream rate must be between 10 and 1000 Hz");
  }
  if (!(c.realtime_factor >= 0.0)) throw ConfigError("realtime factor must be non-negative");
  switch (c.source) {
    case SourceKind::kAgent:
      validate(c.agent);
      if (c.mode == SessionMode::kCalibrationOnly) throw ConfigError("an agent needs a task to perform");
      break;
    case SourceKind::kSensorAgent:
      validate(c.agent);
      if (c.mode != SessionMode::kPointing) throw ConfigError("the sensor-level agent only performs pointing");
      break;
    case SourceKind::kScript:
      if (c.script_path.empty()) throw ConfigError("script source needs a script path");
      validate(c.noise);
      break;
    case SourceKind::kCapture:
      if (c.capture_path.empty()) throw ConfigError("capture source needs a capture file");
      break;
    case SourceKind::kSerial:
      if (c.serial_device.empty()) throw ConfigError("serial source needs a device path");
      break;
  }
  if (!c.log_path.empty()) {
    // Probe without clobbering an existing file.
    std::FILE* f = std::fopen(c.log_path.c_str(), "ab");
    if (f == nullptr) throw ConfigError("log path " + c.log_path + " is not writable");
    std::fclose(f);
  }
}

// ---------------------------------------------------------------------------

std::uint64_t MessageHub::subscribe(Subscriber fn) {
  std::lock_guard lock(mu_);
  const std::uint64_t id = next_id_++;
  subs_.emplace(id, std::make_shared<Subscriber>(std::move(fn)));
  return id;
}

void MessageHub::unsubscribe(std::uint64_t id) {
  std::lock_guard lock(mu_);
  subs_.erase(id);
}

void MessageHub::publish(const LiveMessage& message) {
  std::vector<std::shared_ptr<Subscriber>> targets;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, fn] : subs_) targets.push_back(fn);
  }
  for (const auto& fn : targets) (*fn)(message);
}

std::size_t MessageHub::subscribers() const {
  std::lock_guard lock(mu_);
  return subs_.size();
}

bool TraceThrottle::admit(std::uint64_t t_ms) {
  const auto t = static_cast<double>(t_ms);
  if (last_ && t - *last_ < interval_ms_) return false;
  last_ = t;
  return true;
}

// ---------------------------------------------------------------------------

ClientCommand parse_client_command(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("command is not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) throw ConfigError("command lacks a type");
  const std::string type = j["type"].get<std::string>();
  if (type == "stop") return StopRequest{};
  if (type != "calib_update") throw ConfigError("unknown command type '" + type + "'");
  CalibRequest req;
  if (j.contains("id")) {
    if (!j["id"].is_number_unsigned()) throw ConfigError("calib_update id must be a non-negative integer");
    req.id = j["id"].get<std::uint64_t>();
  }
  if (!j.contains("update") || !j["update"].is_object()) throw ConfigError("calib_update needs an update object");
  for (const auto& [key, value] : j["update"].items()) {
    if (!value.is_number()) throw ConfigError("calibration value for " + key + " must be a number");
    req.update[key] = value.get<double>();
  }
  return req;
}

std::string calib_update_command(std::uint64_t id, const ProfileUpdate& update) {
  json u = json::object();
  for (const auto& [k, v] : update) u[k] = v;
  return json{{"type", "calib_update"}, {"id", id}, {"update", u}}.dump();
}

// ---------------------------------------------------------------------------

SessionHeader make_header(const SessionConfig& c) {
  SessionHeader h;
  h.session_id = c.session_id;
  h.cohort = c.cohort;
  h.participant = c.participant;
  h.mode = c.mode;
  h.profile = c.profile_path.empty() ? c.profile : load_profile_file(c.profile_path);
  h.pointing = c.pointing;
  h.arm = c.arm;
  switch (c.source) {
    case SourceKind::kAgent:
    case SourceKind::kSensorAgent:
      h.source = std::string(to_string(c.source)) + ":" + agent_spec(c.agent);
      break;
    case SourceKind::kScript:
      h.source = "script:" + c.script_path;
      break;
    case SourceKind::kCapture:
      h.source = "capture:" + c.capture_path;
      break;
    case SourceKind::kSerial:
      h.source = "serial:" + c.serial_device;
      break;
  }
  return h;
}

Session::Session(SessionConfig config, MessageHub* hub) : config_(std::move(config)), hub_(hub) {
  validate(config_);
  header_ = make_header(config_);
  validate(header_.profile);
  profile_ = header_.profile;
  log_.header = header_;
}

Session::~Session() {
  // Never leave a caller waiting on a request that can no longer be served.
  std::lock_guard lock(mu_);
  for (auto& p : queue_) p.done.set_value({p.id, false, "session destroyed", profile_});
  queue_.clear();
}

// Marks the session ended; anything still queued can no longer take effect.
void Session::reject_pending(const std::string& reason) {
  std::vector<Pending> batch;
  CalibrationProfile current;
  {
    std::lock_guard lock(mu_);
    ended_ = true;
    batch.swap(queue_);
    current = profile_;
    stats_.calibrations_rejected += batch.size();
  }
  for (auto& p : batch) {
    publish(MessageType::kCalibReject, json{{"type", "calib_reject"},
                                            {"id", p.id},
                                            {"reason", reason},
                                            {"profile", profile_json(current)}}
                                           .dump());
    p.done.set_value({p.id, false, reason, current});
  }
}

CalibrationProfile Session::profile() const {
  std::lock_guard lock(mu_);
  return profile_;
}

SessionStats Session::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

std::string Session::hello_message() const {
  return json{{"type", "hello"},
              {"session_id", header_.session_id},
              {"mode", std::string(to_string(header_.mode))},
              {"profile", profile_json(profile())}}
      .dump();
}

void Session::request_stop() { stop_ = true; }

std::future<CalibResult> Session::apply_calibration(ProfileUpdate update, std::optional<std::uint64_t> id) {
  std::unique_lock lock(mu_);
  const std::uint64_t rid = id ? *id : next_calib_id_++;
  Pending p{rid, std::move(update), {}};
  std::future<CalibResult> f = p.done.get_future();
  if (ended_) {
    CalibResult r{rid, false, "session has ended", profile_};
    lock.unlock();
    publish(MessageType::kCalibReject,
            json{{"type", "calib_reject"}, {"id", rid}, {"reason", r.reason}, {"profile", profile_json(r.profile)}}
                .dump());
    p.done.set_value(std::move(r));
    return f;
  }
  queue_.push_back(std::move(p));
  return f;
}

void Session::submit(const ClientCommand& command) {
  if (const auto* c = std::get_if<CalibRequest>(&command)) {
    apply_calibration(c->update, c->id);
  } else {
    request_stop();
  }
}

void Session::publish(MessageType type, const std::string& text) {
  if (hub_ != nullptr) hub_->publish({type, text});
}

void Session::drain_commands(std::uint64_t t_ms) {
  std::vector<Pending> batch;
  {
    std::lock_guard lock(mu_);
    if (queue_.empty()) return;
    batch.swap(queue_);
  }
  for (auto& p : batch) {
    CalibResult r{p.id, false, {}, {}};
    CalibrationProfile current = profile();
    try {
      CalibrationProfile merged = merge_update(current, p.update);
      if (pipeline_) pipeline_->set_profile(merged);
      CalibrationChange change{t_ms, log_.trial_count(), merged};
      log_.calibrations.push_back(change);
      if (writer_) writer_->append(change);
      {
        std::lock_guard lock(mu_);
        profile_ = merged;
        ++stats_.calibrations_applied;
      }
      r.accepted = true;
      r.profile = std::move(merged);
      publish(MessageType::kCalibAck, json{{"type", "calib_ack"}, {"id", r.id}, {"profile", profile_json(r.profile)}}.dump());
    } catch (const ConfigError& e) {
      {
        std::lock_guard lock(mu_);
        ++stats_.calibrations_rejected;
      }
      r.reason = e.what();
      r.profile = current;
      publish(MessageType::kCalibReject, json{{"type", "calib_reject"},
                                              {"id", r.id},
                                              {"reason", r.reason},
                                              {"profile", profile_json(r.profile)}}
                                             .dump());
    }
    p.done.set_value(std::move(r));
  }
}

void Session::pace(std::uint64_t t_ms) {
  if (!(config_.realtime_factor > 0.0)) return;
  if (!pace_origin_t_) {
    pace_origin_t_ = t_ms;
    pace_origin_wall_ns_ = wall_ns();
    return;
  }
  const double elapsed_ms = static_cast<double>(t_ms - std::min(t_ms, *pace_origin_t_)) / config_.realtime_factor;
  const std::int64_t due = pace_origin_wall_ns_ + static_cast<std::int64_t>(elapsed_ms * 1e6);
  const std::int64_t now = wall_ns();
  if (due > now) std::this_thread::sleep_for(std::chrono::nanoseconds(due - now));
}

bool Session::done() const {
  if (stop_) return true;
  if (pointing_) return pointing_->finished();
  if (arm_) return arm_->finished();
  return false;
}

void Session::publish_task_state(std::uint64_t t_ms, bool force) {
  if (hub_ == nullptr) return;
  if (!state_throttle_.admit(t_ms) && !force) return;
  json j = {{"type", "task_state"}, {"t", t_ms}};
  if (pointing_) {
    j["mode"] = "pointing";
    j["trial_index"] = pointing_->trial_index();
    j["total_trials"] = pointing_->total_trials();
    j["pointer"] = to_json(pointing_->pointer());
    j["halted"] = pointing_->halted();
    if (!pointing_->finished()) {
      j["target"] = to_json(pointing_->active_target_pos());
      j["width"] = pointing_->active_target().width;
    }
  } else if (arm_) {
    j["mode"] = "arm3d";
    j["trial_index"] = arm_->trial_index();
    j["total_trials"] = arm_->total_trials();
    j["endpoint"] = to_json(arm_->endpoint());
    j["returning"] = arm_->returning();
    j["radius"] = kSphereRadius;
    j["dwell_progress"] = arm_->dwell_progress(t_ms);
    if (!arm_->finished()) {
      j["sphere"] = to_json(arm_->active_sphere_center());
      j["start"] = to_json(arm_->config().start);
    }
  } else {
    return;
  }
  publish(MessageType::kTaskState, j.dump());
}

void Session::on_trial(const TrialRecord2D& trial) {
  log_.pointing_trials.push_back(trial);
  if (writer_) writer_->append(trial);
  publish(MessageType::kTrial,
          json{{"type", "trial"}, {"index", trial.index}, {"time_s", trial.selection_time_s()},
               {"misclicks", trial.misclicks.size()}}
              .dump());
}

void Session::on_trial(const TrialRecord3D& trial) {
  log_.arm_trials.push_back(trial);
  if (writer_) writer_->append(trial);
  publish(MessageType::kTrial,
          json{{"type", "trial"}, {"index", trial.index}, {"time_s", trial.completion_time_s()}}.dump());
}

void Session::on_event(const ControlEvent& e) {
  last_t_ = std::max(last_t_, e.t_ms);
  tape_.entries.emplace_back(e);
  {
    std::lock_guard lock(mu_);
    ++stats_.events;
  }
  if (!e.is_motion()) {
    json j = event_json(e);
    j["type"] = "event";
    publish(MessageType::kEvent, j.dump());
  }
  if (pointing_) {
    if (auto r = pointing_->step(e)) on_trial(*r);
  } else if (arm_) {
    if (auto r = arm_->step(e)) on_trial(*r);
  }
  publish_task_state(e.t_ms, !e.is_motion());
}

void Session::on_tick(std::uint64_t t_ms) {
  last_t_ = std::max(last_t_, t_ms);
  if (!arm_) return;
  tape_.entries.emplace_back(Tick{t_ms});
  if (auto r = arm_->advance(t_ms)) on_trial(*r);
  publish_task_state(t_ms, false);
}

void Session::on_frame(const SensorFrame& frame) {
  last_t_ = std::max(last_t_, frame.t_ms);
  drain_commands(frame.t_ms);
  const std::vector<ControlEvent> events = pipeline_->process(frame);
  {
    std::lock_guard lock(mu_);
    ++stats_.frames;
  }
  const auto& filtered = pipeline_->last_filtered();
  if (hub_ != nullptr && filtered && filtered->t_ms == frame.t_ms && trace_throttle_.admit(frame.t_ms)) {
    publish(MessageType::kTrace, json{{"type", "trace"},
                                      {"t", filtered->t_ms},
                                      {"ax", filtered->ax},
                                      {"ay", filtered->ay},
                                      {"az", filtered->az},
                                      {"stretch", filtered->stretch},
                                      {"button", filtered->button},
                                      {"mode", std::string(mode_name(pipeline_->state().mode()))}}
                                     .dump());
    std::lock_guard lock(mu_);
    ++stats_.traces_sent;
  }
  for (const ControlEvent& e : events) {
    if (done()) break;
    on_event(e);
  }
  if (!done()) on_tick(frame.t_ms);
}

void Session::run_bytes(ByteSource& source) {
  std::vector<std::uint8_t> buf(4096);
  std::vector<SensorFrame> frames;
  while (!done()) {
    const std::size_t n = source.read(buf);
    if (n == 0) break;
    frames.clear();
    decoder_.decode(std::span<const std::uint8_t>(buf.data(), n), frames);
    for (const SensorFrame& f : frames) {
      if (done()) break;
      pace(f.t_ms);
      on_frame(f);
    }
    std::lock_guard lock(mu_);
    stats_.decoder = decoder_.stats();
  }
}

void Session::run_tape(const EventTape& tape) {
  for (const TapeEntry& entry : tape.entries) {
    if (done()) break;
    if (const auto* e = std::get_if<ControlEvent>(&entry)) {
      drain_commands(e->t_ms);
      pace(e->t_ms);
      on_event(*e);
    } else {
      const std::uint64_t t = std::get<Tick>(entry).t_ms;
      drain_commands(t);
      pace(t);
      on_tick(t);
    }
  }
}

SessionLog Session::run() {
  {
    std::lock_guard lock(mu_);
    if (ended_) throw TaskError("session has already run");
  }
  if (running_.exchange(true)) throw TaskError("session is already running");
  if (!config_.log_path.empty()) writer_ = std::make_unique<SessionLogWriter>(config_.log_path, header_);
  tape_ = EventTape{};
  tape_.header = header_;

  const ControlMode control = header_.mode == SessionMode::kArm3D ? ControlMode::kArm3D : ControlMode::kPointing;
  pipeline_ = std::make_unique<Pipeline>(header_.profile, control);
  std::uint64_t start_t = 0;
  std::optional<EventTape> agent_tape;
  std::vector<std::uint8_t> bytes;
  std::unique_ptr<ByteSource> source;

  try {
    switch (config_.source) {
      case SourceKind::kAgent: {
        AgentRun r = header_.mode == SessionMode::kArm3D ? run_arm_agent(config_.agent, header_)
                                                          : run_pointing_agent(config_.agent, header_);
        start_t = r.tape.start_t_ms;
        agent_tape = std::move(r.tape);
        break;
      }
      case SourceKind::kSensorAgent: {
        SensorRun r = run_pointing_sensor_agent(config_.agent, header_, config_.rate_hz);
        source = std::make_unique<MemoryByteSource>(stream_over_wire(r.frames).bytes);
        break;
      }
      case SourceKind::kScript: {
        const GestureScript script = load_script_file(config_.script_path);
        source = std::make_unique<MemoryByteSource>(
            stream_over_wire(synthesize(script, config_.noise, config_.rate_hz)).bytes);
        break;
      }
      case SourceKind::kCapture:
        source = std::make_unique<FileByteSource>(config_.capture_path);
        break;
      case SourceKind::kSerial:
        source = open_serial_port(config_.serial_device, config_.serial_baud);
        break;
    }

    tape_.start_t_ms = start_t;
    if (header_.mode == SessionMode::kPointing) {
      pointing_ = std::make_unique<PointingTask>(header_.pointing);
      pointing_->start(start_t);
    } else if (header_.mode == SessionMode::kArm3D) {
      arm_ = std::make_unique<ArmTask>(header_.arm);
      arm_->start(start_t);
    }
    publish_task_state(start_t, true);

    if (agent_tape) {
      run_tape(*agent_tape);
    } else {
      run_bytes(*source);
    }
  } catch (...) {
    log_.complete = false;
    if (writer_) {
      try {
        writer_->finish(false);
      } catch (const IoError&) {
      }
    }
    reject_pending("session failed");
    running_ = false;
    throw;
  }

  if (pointing_) log_.complete = pointing_->finished();
  else if (arm_) log_.complete = arm_->finished();
  else log_.complete = !stop_;
  if (writer_) writer_->finish(log_.complete);
  if (!config_.tape_path.empty()) write_text_file(config_.tape_path, serialize(tape_));

  {
    std::lock_guard lock(mu_);
    stats_.decoder = decoder_.stats();
  }
  reject_pending("session has ended");
  const SessionStats s = stats();
  publish(MessageType::kSessionEnd, json{{"type", "session_end"},
                                         {"trials", log_.trial_count()},
                                         {"complete", log_.complete},
                                         {"frames", s.frames},
                                         {"events", s.events},
                                         {"decoder",
                                          {{"frames", s.decoder.frames},
                                           {"crc_failures", s.decoder.crc_failures},
                                           {"malformed", s.decoder.malformed},
                                           {"sync_losses", s.decoder.sync_losses},
                                           {"seq_gaps", s.decoder.seq_gaps}}}}
                                        .dump());
  running_ = false;
  return log_;
}

}  // namespace mentum
