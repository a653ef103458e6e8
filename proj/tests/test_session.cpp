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

#include <chrono>
#include <csignal>
#include <fstream>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

#include "json.hpp"

#include "mentum/device_sim.h"
#include "mentum/error.h"
#include "mentum/fitts.h"
#include "mentum/live_server.h"
#include "mentum/session.h"
#include "test_util.h"

namespace mentum {
namespace {

using nlohmann::json;
using namespace std::chrono_literals;

SessionConfig agent_config(const std::string& log) {
  SessionConfig c;
  c.source = SourceKind::kAgent;
  c.log_path = log;
  c.session_id = "s";
  c.participant = "p01";
  return c;
}

std::string write_script(const testing::TempDir& dir, double seconds, double stretch = 0) {
  GestureScript s;
  s.segments.push_back({seconds * 500, 0, 0, 0, stretch, false, Interpolation::kHold});
  s.segments.push_back({seconds * 500, 600, -600, 0, 900, false, Interpolation::kLinearRamp});
  const auto path = dir.file("script.json");
  write_text_file(path, script_to_json(s));
  return path;
}

TEST(SessionConfig, Validation) {
  testing::TempDir dir;
  SessionConfig c = agent_config(dir.file("x.jsonl"));
  c.mode = SessionMode::kCalibrationOnly;
  EXPECT_THROW(Session{c}, ConfigError);
  c = agent_config(dir.file("x.jsonl"));
  c.rate_hz = 5;
  EXPECT_THROW(Session{c}, ConfigError);
  c = agent_config(dir.file("missing/x.jsonl"));
  EXPECT_THROW(Session{c}, ConfigError);
  c = agent_config("");
  c.source = SourceKind::kScript;
  EXPECT_THROW(Session{c}, ConfigError);
  c.source = SourceKind::kSensorAgent;
  c.mode = SessionMode::kArm3D;
  EXPECT_THROW(Session{c}, ConfigError);
  EXPECT_EQ(source_kind_from_string("sensor-agent"), SourceKind::kSensorAgent);
  EXPECT_THROW(source_kind_from_string("pigeon"), ConfigError);
}

TEST(Session, AgentRunLogsAndAnalyzes) {
  testing::TempDir dir;
  SessionConfig c = agent_config(dir.file("a.jsonl"));
  c.tape_path = dir.file("a.tape.jsonl");
  Session s(c);
  const SessionLog live = s.run();
  EXPECT_TRUE(live.complete);
  EXPECT_EQ(live.pointing_trials.size(), 100u);
  const SessionLog disk = read_session_log(c.log_path);
  EXPECT_EQ(serialize(disk), read_text_file(c.log_path));
  EXPECT_EQ(serialize(disk), serialize(live));
  EXPECT_TRUE(check_log(disk).empty());
  const Report r = build_report({disk});
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_EQ(r.cohorts.size(), 1u);
  // The tape reproduces the log.
  EXPECT_EQ(serialize(replay(parse_event_tape(read_text_file(c.tape_path)))), serialize(disk));
  EXPECT_THROW(s.run(), TaskError);
}

TEST(Session, ArmAgentRun) {
  testing::TempDir dir;
  SessionConfig c = agent_config(dir.file("arm.jsonl"));
  c.mode = SessionMode::kArm3D;
  c.agent.arm_speed_m_s = 0.5;
  Session s(c);
  const SessionLog log = s.run();
  EXPECT_TRUE(log.complete);
  EXPECT_EQ(log.arm_trials.size(), 20u);
  EXPECT_TRUE(check_log(read_session_log(c.log_path)).empty());
}

TEST(Session, SensorAgentRunsThroughDecoder) {
  testing::TempDir dir;
  SessionConfig c = agent_config(dir.file("sensor.jsonl"));
  c.source = SourceKind::kSensorAgent;
  c.agent.a_true = 0.5;
  c.agent.b_true = 0.8;
  Session s(c);
  const SessionLog log = s.run();
  EXPECT_TRUE(log.complete);
  EXPECT_EQ(log.pointing_trials.size(), 100u);
  EXPECT_GT(s.stats().frames, 1000u);
  EXPECT_EQ(s.stats().decoder.faults(), 0u);
}

TEST(Session, CaptureSourceMatchesScript) {
  testing::TempDir dir;
  const auto script = write_script(dir, 4, 0);
  const auto frames = synthesize(load_script_file(script), {}, 100);
  const auto bytes = stream_over_wire(frames).bytes;
  {
    std::ofstream out(dir.file("cap.bin"), std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  auto run = [&](SourceKind kind) {
    SessionConfig c;
    c.mode = SessionMode::kCalibrationOnly;
    c.source = kind;
    c.script_path = script;
    c.capture_path = dir.file("cap.bin");
    c.tape_path = dir.file(kind == SourceKind::kScript ? "s.tape" : "c.tape");
    Session s(c);
    s.run();
    EXPECT_EQ(s.stats().frames, frames.size());
    return parse_event_tape(read_text_file(c.tape_path)).entries;
  };
  const auto a = run(SourceKind::kScript);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, run(SourceKind::kCapture));
}

TEST(Session, CrashLeavesParseablePrefix) {
  testing::TempDir dir;
  const auto path = dir.file("crash.jsonl");
  const pid_t pid = ::fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    SessionConfig c = agent_config(path);
    c.realtime_factor = 20;  // roughly 10 s of wall time for the whole session
    try {
      Session s(c);
      s.run();
    } catch (...) {
    }
    ::_exit(0);
  }
  // Wait until a few trials are on disk, then kill without warning.
  const auto deadline = std::chrono::steady_clock::now() + 30s;
  std::size_t lines = 0;
  while (std::chrono::steady_clock::now() < deadline) {
    std::ifstream in(path);
    std::string line;
    lines = 0;
    while (std::getline(in, line)) ++lines;
    if (lines >= 6) break;
    std::this_thread::sleep_for(20ms);
  }
  ::kill(pid, SIGKILL);
  int status = 0;
  ::waitpid(pid, &status, 0);
  ASSERT_TRUE(WIFSIGNALED(status));
  ASSERT_GE(lines, 6u);

  const SessionLog log = read_session_log(path);
  EXPECT_FALSE(log.complete);
  EXPECT_GE(log.pointing_trials.size(), 5u);
  EXPECT_LT(log.pointing_trials.size(), 100u);
  EXPECT_TRUE(check_log(log).empty());
}

TEST(Session, CalibrationOnlyStreamsThrottledTraces) {
  testing::TempDir dir;
  SessionConfig c;
  c.mode = SessionMode::kCalibrationOnly;
  c.source = SourceKind::kScript;
  c.script_path = write_script(dir, 10);
  c.log_path = dir.file("cal.jsonl");
  MessageHub hub;
  std::vector<json> traces;
  int task_states = 0;
  hub.subscribe([&](const LiveMessage& m) {
    if (m.type == MessageType::kTrace) traces.push_back(json::parse(m.json));
    if (m.type == MessageType::kTaskState) ++task_states;
  });
  Session s(c, &hub);
  const SessionLog log = s.run();
  EXPECT_EQ(log.trial_count(), 0u);
  EXPECT_TRUE(log.complete);
  EXPECT_EQ(task_states, 0);
  ASSERT_GT(traces.size(), 200u);
  EXPECT_LE(traces.size(), 301u);
  for (std::size_t i = 1; i < traces.size(); ++i) {
    const double gap = traces[i]["t"].get<double>() - traces[i - 1]["t"].get<double>();
    ASSERT_GE(gap, 1000.0 / 30 - 1e-9);
  }
  EXPECT_EQ(s.stats().traces_sent, traces.size());
}

TEST(Session, CalibrationRequestsApplyInOrder) {
  testing::TempDir dir;
  SessionConfig c;
  c.mode = SessionMode::kCalibrationOnly;
  c.source = SourceKind::kScript;
  c.script_path = write_script(dir, 1);
  c.log_path = dir.file("cal.jsonl");
  Session s(c);
  auto ok = s.apply_calibration({{"stretch_press", 700}});
  auto bad = s.apply_calibration({{"stretch_release", 700}});
  std::vector<std::future<CalibResult>> burst;
  for (int i = 0; i < 100; ++i) burst.push_back(s.apply_calibration({{"speed_xy", 100.0 + i}}));
  s.run();

  const CalibResult a = ok.get();
  EXPECT_TRUE(a.accepted);
  EXPECT_EQ(a.profile.stretch_press, 700);
  const CalibResult b = bad.get();
  EXPECT_FALSE(b.accepted);
  EXPECT_FALSE(b.reason.empty());
  EXPECT_EQ(b.profile.stretch_press, 700);
  for (auto& f : burst) EXPECT_TRUE(f.get().accepted);
  EXPECT_EQ(s.profile().speed_xy, 199.0);
  EXPECT_EQ(s.profile().stretch_press, 700);
  EXPECT_EQ(s.stats().calibrations_applied, 101u);
  EXPECT_EQ(s.stats().calibrations_rejected, 1u);

  const SessionLog log = read_session_log(c.log_path);
  ASSERT_EQ(log.calibrations.size(), 101u);
  EXPECT_EQ(log.calibrations.back().profile, s.profile());

  // After the end, requests are turned away.
  auto late = s.apply_calibration({{"speed_xy", 5}});
  EXPECT_FALSE(late.get().accepted);
  EXPECT_EQ(s.profile().speed_xy, 199.0);
}

TEST(Session, StopEndsEarly) {
  testing::TempDir dir;
  SessionConfig c = agent_config(dir.file("stop.jsonl"));
  c.realtime_factor = 5;
  Session s(c);
  std::thread t([&] {
    std::this_thread::sleep_for(200ms);
    s.submit(StopRequest{});
  });
  const SessionLog log = s.run();
  t.join();
  EXPECT_FALSE(log.complete);
  EXPECT_FALSE(read_session_log(c.log_path).complete);
}

TEST(Session, ObserversDoNotChangeTheLog) {
  testing::TempDir dir;
  SessionConfig c = agent_config(dir.file("quiet.jsonl"));
  c.agent.misclick_rate = 0.1;
  Session(c).run();
  c.log_path = dir.file("watched.jsonl");
  MessageHub hub;
  std::size_t seen = 0;
  hub.subscribe([&](const LiveMessage&) { ++seen; });
  Session watched(c, &hub);
  watched.apply_calibration({{"stretch_press", 650}});
  watched.run();
  EXPECT_GT(seen, 100u);
  std::string quiet = read_text_file(dir.file("quiet.jsonl"));
  std::string loud = read_text_file(c.log_path);
  // The only difference is the calibration record.
  const auto tag = loud.find("\"record\":\"calibration\"");
  ASSERT_NE(tag, std::string::npos);
  const auto at = loud.rfind('\n', tag) + 1;
  loud.erase(at, loud.find('\n', at) - at + 1);
  EXPECT_EQ(quiet, loud);
}

TEST(Commands, ParseAndFormat) {
  const auto cmd = parse_client_command(calib_update_command(7, {{"stretch_press", 640}}));
  const auto* req = std::get_if<CalibRequest>(&cmd);
  ASSERT_NE(req, nullptr);
  EXPECT_EQ(req->id, 7u);
  EXPECT_EQ(req->update.at("stretch_press"), 640);
  EXPECT_TRUE(std::holds_alternative<StopRequest>(parse_client_command(R"({"type":"stop"})")));
  EXPECT_THROW(parse_client_command("nope"), ConfigError);
  EXPECT_THROW(parse_client_command(R"({"type":"dance"})"), ConfigError);
  EXPECT_THROW(parse_client_command(R"({"type":"calib_update","update":{"a":"b"}})"), ConfigError);
  EXPECT_THROW(parse_client_command(R"({"type":"calib_update","id":-1,"update":{}})"), ConfigError);
}

TEST(Throttle, AdmitsAtMostRate) {
  TraceThrottle th(30);
  int admitted = 0;
  for (std::uint64_t t = 0; t < 10000; ++t) admitted += th.admit(t);
  EXPECT_LE(admitted, 301);
  EXPECT_GE(admitted, 290);
}

std::optional<json> next_of(LiveClient& client, const std::string& type, std::chrono::milliseconds timeout = 5s) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    auto m = client.next(100ms);
    if (!m) continue;
    json j = json::parse(*m);
    if (j["type"] == type) return j;
  }
  return std::nullopt;
}

TEST(LiveServer, LoopbackCalibrationAndStop) {
  testing::TempDir dir;
  SessionConfig c;
  c.mode = SessionMode::kCalibrationOnly;
  c.source = SourceKind::kScript;
  c.script_path = write_script(dir, 60);
  c.log_path = dir.file("live.jsonl");
  c.realtime_factor = 1;
  MessageHub hub;
  Session session(c, &hub);
  LiveServer server(
      hub, [&](const std::string& text) { session.submit(parse_client_command(text)); },
      [&] { return session.hello_message(); }, 0);
  ASSERT_GT(server.port(), 0);

  LiveClient client("127.0.0.1", server.port());
  const auto hello = next_of(client, "hello");
  ASSERT_TRUE(hello);
  EXPECT_EQ((*hello)["mode"], "calibration");

  std::thread runner([&] { session.run(); });
  EXPECT_TRUE(next_of(client, "trace"));

  client.send(calib_update_command(42, {{"stretch_press", 720}}));
  const auto ack = next_of(client, "calib_ack");
  ASSERT_TRUE(ack);
  EXPECT_EQ((*ack)["id"], 42);
  EXPECT_EQ((*ack)["profile"]["values"]["stretch_press"], 720);

  client.send(calib_update_command(43, {{"stretch_release", 800}}));
  const auto reject = next_of(client, "calib_reject");
  ASSERT_TRUE(reject);
  EXPECT_EQ((*reject)["id"], 43);

  client.send("not json");
  EXPECT_TRUE(next_of(client, "error"));

  client.send(R"({"type":"stop"})");
  const auto end = next_of(client, "session_end");
  runner.join();
  ASSERT_TRUE(end);
  EXPECT_EQ((*end)["trials"], 0);
  EXPECT_EQ(session.profile().stretch_press, 720);
  EXPECT_EQ(server.clients(), 1u);
  client.close();
  server.stop();
}

TEST(LiveServer, SlowClientDoesNotStallPublisher) {
  MessageHub hub;
  LiveServer server(hub, [](const std::string&) {}, [] { return std::string(R"({"type":"hello"})"); }, 0);
  LiveClient client("127.0.0.1", server.port());
  ASSERT_TRUE(client.next(5s));
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 50000; ++i) hub.publish({MessageType::kTrace, R"({"type":"trace","t":0})"});
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 5s);
  server.stop();
}

}  // namespace
}  // namespace mentum
