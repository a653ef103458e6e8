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

// Session orchestration: source -> wire decoder -> signal pipeline -> task
// engine -> append-only log, with a live message feed for any number of
// observers and a serialized command queue for calibration updates.
//
// Live messages are single JSON objects with a "type" field:
//   hello        {session_id, mode, profile}              sent on connect
//   trace        {t, ax, ay, az, stretch, button, mode}   at most 30 per
//                                                          second of sensor time
//   calib_ack    {id, profile}
//   calib_reject {id, reason, profile}
//   task_state   {t, trial_index, total_trials, ...}
//   event        {t, kind, dx?, dy?, dz?}                 non-motion events
//   trial        {index, time_s}
//   session_end  {trials, complete, frames, decoder{...}}
// Clients send {"type":"calib_update","id":n,"update":{key:value,...}} and
// {"type":"stop"}.

#ifndef MENTUM_SESSION_H_
#define MENTUM_SESSION_H_

#include <atomic>
#include <cstdint>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mentum/agent.h"
#include "mentum/device_link.h"
#include "mentum/device_sim.h"
#include "mentum/profile.h"
#include "mentum/session_log.h"
#include "mentum/translator.h"

namespace mentum {

enum class SourceKind {
  kAgent,        // event-level synthetic operator
  kSensorAgent,  // synthetic operator through the sensor pipeline (pointing)
  kScript,       // gesture script synthesized by the device simulator
  kCapture,      // recorded wire bytes from a file
  kSerial,       // live device
};

std::string_view to_string(SourceKind kind);
SourceKind source_kind_from_string(std::string_view name);

struct SessionConfig {
  SessionMode mode = SessionMode::kPointing;
  SourceKind source = SourceKind::kAgent;
  AgentParams agent;
  std::string script_path;
  NoiseModel noise;
  std::string capture_path;
  std::string serial_device;
  int serial_baud = 115200;

  std::string profile_path;  // empty: profile below
  CalibrationProfile profile;
  std::string log_path;
  std::string tape_path;  // optional ControlEvent tape
  double rate_hz = kDefaultStreamRateHz;

  std::string session_id = "session";
  std::string cohort = "default";
  std::string participant;
  PointingConfig pointing;
  ArmConfig arm;

  // 0 runs as fast as possible; 1 paces the source at wall-clock speed.
  double realtime_factor = 0.0;
};

// Throws ConfigError for missing source inputs, bad rates or an unwritable
// log path.
void validate(const SessionConfig& config);

enum class MessageType { kHello, kTrace, kCalibAck, kCalibReject, kTaskState, kEvent, kTrial, kSessionEnd };

std::string_view to_string(MessageType type);

struct LiveMessage {
  MessageType type = MessageType::kTrace;
  std::string json;
};

// Fan-out of live messages. Subscribers are called on the publishing thread
// and must not block; unsubscribe is safe from any thread.
class MessageHub {
 public:
  using Subscriber = std::function<void(const LiveMessage&)>;

  std::uint64_t subscribe(Subscriber fn);
  void unsubscribe(std::uint64_t id);
  void publish(const LiveMessage& message);
  std::size_t subscribers() const;

 private:
  mutable std::mutex mu_;
  std::uint64_t next_id_ = 1;
  std::map<std::uint64_t, std::shared_ptr<Subscriber>> subs_;
};

// Passes a trace at sensor time t when at least 1/max_hz has elapsed since
// the last one passed.
class TraceThrottle {
 public:
  explicit TraceThrottle(double max_hz = 30.0) : interval_ms_(1000.0 / max_hz) {}
  bool admit(std::uint64_t t_ms);

 private:
  double interval_ms_;
  std::optional<double> last_;
};

struct CalibResult {
  std::uint64_t id = 0;
  bool accepted = false;
  std::string reason;
  CalibrationProfile profile;  // effective profile after the request
};

struct CalibRequest {
  std::uint64_t id = 0;
  ProfileUpdate update;
};
struct StopRequest {};
using ClientCommand = std::variant<CalibRequest, StopRequest>;

// Throws ConfigError on malformed input.
ClientCommand parse_client_command(const std::string& text);
std::string calib_update_command(std::uint64_t id, const ProfileUpdate& update);

struct SessionStats {
  std::uint64_t frames = 0;
  std::uint64_t events = 0;
  std::uint64_t traces_sent = 0;
  std::uint64_t calibrations_applied = 0;
  std::uint64_t calibrations_rejected = 0;
  DecoderStats decoder;
};

class Session {
 public:
  explicit Session(SessionConfig config, MessageHub* hub = nullptr);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  // Drives the source until it is exhausted, the task finishes or stop is
  // requested. Trials are written to the log as they complete. Returns the
  // session as logged. Rethrows source and I/O failures after marking the
  // log partial.
  SessionLog run();

  void request_stop();

  // Queued and applied in submission order at the next frame boundary (for
  // event-level sources, the next event). Requests made after the session
  // ends are rejected.
  std::future<CalibResult> apply_calibration(ProfileUpdate update, std::optional<std::uint64_t> id = {});
  void submit(const ClientCommand& command);

  CalibrationProfile profile() const;
  const SessionHeader& header() const { return header_; }
  std::string hello_message() const;
  SessionStats stats() const;
  bool running() const { return running_; }

 private:
  struct Pending {
    std::uint64_t id;
    ProfileUpdate update;
    std::promise<CalibResult> done;
  };

  void drain_commands(std::uint64_t t_ms);
  void reject_pending(const std::string& reason);
  void on_frame(const SensorFrame& frame);
  void on_event(const ControlEvent& event);
  void on_tick(std::uint64_t t_ms);
  void on_trial(const TrialRecord2D& trial);
  void on_trial(const TrialRecord3D& trial);
  void publish_task_state(std::uint64_t t_ms, bool force);
  void publish(MessageType type, const std::string& json);
  void pace(std::uint64_t t_ms);
  bool done() const;
  void run_bytes(ByteSource& source);
  void run_tape(const EventTape& tape);

  SessionConfig config_;
  MessageHub* hub_;
  SessionHeader header_;
  SessionLog log_;
  std::unique_ptr<SessionLogWriter> writer_;
  EventTape tape_;

  std::unique_ptr<Pipeline> pipeline_;
  StreamDecoder decoder_;
  std::unique_ptr<PointingTask> pointing_;
  std::unique_ptr<ArmTask> arm_;
  TraceThrottle trace_throttle_;
  TraceThrottle state_throttle_;

  mutable std::mutex mu_;  // guards queue_, profile_, stats_, ended_
  std::vector<Pending> queue_;
  CalibrationProfile profile_;
  SessionStats stats_;
  std::uint64_t next_calib_id_ = 1;
  bool ended_ = false;

  std::atomic<bool> stop_{false};
  std::atomic<bool> running_{false};
  std::uint64_t last_t_ = 0;
  std::optional<std::uint64_t> pace_origin_t_;
  std::int64_t pace_origin_wall_ns_ = 0;
};

// Builds the header a session with this config would log.
SessionHeader make_header(const SessionConfig& config);

}  // namespace mentum

#endif  // MENTUM_SESSION_H_
