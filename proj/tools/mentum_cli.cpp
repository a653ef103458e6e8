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

// mentum: command-line front end for sessions, simulation and analysis.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "mentum/agent.h"
#include "mentum/device_sim.h"
#include "mentum/error.h"
#include "mentum/fitts.h"
#include "mentum/live_server.h"
#include "mentum/profile.h"
#include "mentum/session.h"
#include "mentum/session_log.h"
#include "mentum/text.h"

namespace fs = std::filesystem;
using namespace mentum;

namespace {

// Default profile: $MENTUM_CONFIG_DIR/profile.txt when the variable is set.
std::string default_profile_path() {
  const char* dir = std::getenv("MENTUM_CONFIG_DIR");
  if (dir == nullptr || *dir == '\0') return {};
  return (fs::path(dir) / "profile.txt").string();
}

struct SourceOptions {
  std::string agent = "a=0.5,b=2.0,sigma=0.12,seed=7";
  bool sensor = false;
  std::string script;
  std::string capture;
  std::string serial;
  int baud = 115200;
  double rate = kDefaultStreamRateHz;
  std::string profile;
  double noise_tilt = 0.0;
  double noise_stretch = 0.0;
  std::uint64_t noise_seed = 1;
};

void add_source_options(CLI::App* cmd, SourceOptions& o) {
  cmd->add_option("--agent", o.agent, "Agent parameters, e.g. a=0.5,b=2.0,sigma=0.12,seed=7");
  cmd->add_flag("--sensor", o.sensor, "Drive the agent through the sensor pipeline (pointing only)");
  cmd->add_option("--script", o.script, "Gesture script (JSON) played through the device simulator");
  cmd->add_option("--capture", o.capture, "Recorded wire bytes");
  cmd->add_option("--serial", o.serial, "Serial device path");
  cmd->add_option("--baud", o.baud, "Serial baud rate");
  cmd->add_option("--rate", o.rate, "Stream rate in Hz")->check(CLI::Range(kMinStreamRateHz, kMaxStreamRateHz));
  cmd->add_option("--profile", o.profile, "Calibration profile (default: $MENTUM_CONFIG_DIR/profile.txt)");
  cmd->add_option("--noise-tilt", o.noise_tilt, "Script noise sigma on tilt channels (milli-g)");
  cmd->add_option("--noise-stretch", o.noise_stretch, "Script noise sigma on stretch (counts)");
  cmd->add_option("--noise-seed", o.noise_seed, "Script noise seed");
}

SessionConfig base_config(const SourceOptions& o, SessionMode mode) {
  SessionConfig c;
  c.mode = mode;
  c.rate_hz = o.rate;
  c.profile_path = o.profile.empty() ? default_profile_path() : o.profile;
  if (!c.profile_path.empty() && o.profile.empty() && !fs::exists(c.profile_path)) c.profile_path.clear();
  const int picked = !o.script.empty() + !o.capture.empty() + !o.serial.empty();
  if (picked > 1) throw ConfigError("choose one of --script, --capture, --serial");
  if (!o.script.empty()) {
    c.source = SourceKind::kScript;
    c.script_path = o.script;
    c.noise.sigma_ax = c.noise.sigma_ay = c.noise.sigma_az = o.noise_tilt;
    c.noise.sigma_stretch = o.noise_stretch;
    c.noise.seed = o.noise_seed;
  } else if (!o.capture.empty()) {
    c.source = SourceKind::kCapture;
    c.capture_path = o.capture;
  } else if (!o.serial.empty()) {
    c.source = SourceKind::kSerial;
    c.serial_device = o.serial;
    c.serial_baud = o.baud;
  } else {
    c.source = o.sensor ? SourceKind::kSensorAgent : SourceKind::kAgent;
    c.agent = parse_agent_spec(o.agent);
  }
  return c;
}

std::string participant_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "p%02d", i + 1);
  return buf;
}

void print_summary(const SessionLog& log, const std::string& path) {
  std::cout << path << ": " << log.trial_count() << " trials, " << (log.complete ? "complete" : "partial") << '\n';
  for (const auto& problem : check_log(log)) std::cout << "  check: " << problem << '\n';
}

int run_task(SessionMode mode, const SourceOptions& src, int participants, const std::string& out_dir,
             const std::string& cohort, bool tapes, std::uint64_t task_seed, int trials) {
  fs::create_directories(out_dir);
  const bool agent = src.script.empty() && src.capture.empty() && src.serial.empty();
  if (!agent && participants != 1) throw ConfigError("only agent sources support several participants");
  for (int i = 0; i < participants; ++i) {
    SessionConfig c = base_config(src, mode);
    const std::string name = participant_name(i);
    c.cohort = cohort;
    c.participant = name;
    c.session_id = cohort + "-" + name;
    if (agent) c.agent.seed = c.agent.seed * 1000 + static_cast<std::uint64_t>(i);
    c.pointing.seed = task_seed * 1000 + static_cast<std::uint64_t>(i);
    c.arm.seed = task_seed * 1000 + static_cast<std::uint64_t>(i);
    if (trials > 0) c.arm.trials = trials;
    c.log_path = (fs::path(out_dir) / (c.session_id + ".jsonl")).string();
    if (tapes) c.tape_path = (fs::path(out_dir) / (c.session_id + ".tape.jsonl")).string();
    Session session(c);
    print_summary(session.run(), c.log_path);
  }
  return 0;
}

std::vector<SessionLog> load_logs(const std::string& in) {
  std::vector<std::string> paths;
  if (fs::is_directory(in)) {
    for (const auto& entry : fs::directory_iterator(in)) {
      const std::string name = entry.path().filename().string();
      if (entry.is_regular_file() && name.ends_with(".jsonl") && !name.ends_with(".tape.jsonl")) {
        paths.push_back(entry.path().string());
      }
    }
    std::sort(paths.begin(), paths.end());
  } else {
    paths.push_back(in);
  }
  if (paths.empty()) throw IoError("no session logs in " + in);
  std::vector<SessionLog> logs;
  for (const auto& p : paths) {
    SessionLog log = read_session_log(p);
    if (log.truncated_tail) std::cerr << "warning: " << p << " ends in a truncated record\n";
    logs.push_back(std::move(log));
  }
  return logs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mentum: threshold body-machine interface sessions and pointing analytics"};
  app.require_subcommand(1);

  // serve
  SourceOptions serve_src;
  std::uint16_t port = 8765;
  std::string serve_mode = "pointing";
  std::string serve_log = "session.jsonl";
  double realtime = 1.0;
  double linger = 1.0;
  auto* serve = app.add_subcommand("serve", "Run one session and stream live messages over WebSocket");
  add_source_options(serve, serve_src);
  serve->add_option("--port", port, "Listen port (0 picks one)");
  serve->add_option("--mode", serve_mode, "pointing, arm3d or calibration")
      ->check(CLI::IsMember({"pointing", "arm3d", "calibration"}));
  serve->add_option("--log", serve_log, "Session log path");
  serve->add_option("--realtime", realtime, "Pacing factor (1 = wall clock, 0 = unpaced)");
  serve->add_option("--linger", linger, "Seconds to keep serving after the session ends");

  // simulate
  std::string sim_script, sim_out;
  double sim_rate = kDefaultStreamRateHz, sim_corrupt = 0.0, sim_tilt = 0.0, sim_stretch = 0.0, sim_drop = 0.0;
  std::uint64_t sim_seed = 1;
  auto* simulate = app.add_subcommand("simulate", "Synthesize a gesture script into wire bytes");
  simulate->add_option("--script", sim_script, "Gesture script (JSON)")->required();
  simulate->add_option("--out", sim_out, "Output capture file")->required();
  simulate->add_option("--rate", sim_rate, "Stream rate in Hz");
  simulate->add_option("--corrupt", sim_corrupt, "Per-frame corruption probability")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--noise-tilt", sim_tilt, "Noise sigma on tilt channels");
  simulate->add_option("--noise-stretch", sim_stretch, "Noise sigma on stretch");
  simulate->add_option("--dropout", sim_drop, "Frame dropout probability");
  simulate->add_option("--seed", sim_seed, "Noise and corruption seed");

  // calibrate
  std::string cal_profile;
  std::vector<std::string> cal_set;
  bool cal_init = false;
  auto* calibrate = app.add_subcommand("calibrate", "Show or edit a calibration profile");
  calibrate->add_option("--profile", cal_profile, "Profile path (default: $MENTUM_CONFIG_DIR/profile.txt)");
  calibrate->add_option("--set", cal_set, "key=value updates");
  calibrate->add_flag("--init", cal_init, "Start from the default profile");

  // run-pointing / run-arm
  SourceOptions pt_src, arm_src;
  int pt_n = 1, arm_n = 1, arm_trials = 0;
  std::string pt_out = "logs", arm_out = "logs", pt_cohort = "agent", arm_cohort = "agent";
  bool pt_tape = false, arm_tape = false;
  std::uint64_t pt_seed = 1, arm_seed = 1;
  auto* run_pointing = app.add_subcommand("run-pointing", "Run center-out pointing sessions");
  add_source_options(run_pointing, pt_src);
  run_pointing->add_option("--participants", pt_n, "Number of agent participants")->check(CLI::PositiveNumber);
  run_pointing->add_option("--out-dir", pt_out, "Directory for session logs");
  run_pointing->add_option("--cohort", pt_cohort, "Cohort label");
  run_pointing->add_option("--task-seed", pt_seed, "Target schedule seed");
  run_pointing->add_flag("--tape", pt_tape, "Also write event tapes");
  auto* run_arm = app.add_subcommand("run-arm", "Run 3D reach-and-hold sessions");
  add_source_options(run_arm, arm_src);
  run_arm->add_option("--participants", arm_n, "Number of agent participants")->check(CLI::PositiveNumber);
  run_arm->add_option("--out-dir", arm_out, "Directory for session logs");
  run_arm->add_option("--cohort", arm_cohort, "Cohort label");
  run_arm->add_option("--task-seed", arm_seed, "Target order seed");
  run_arm->add_option("--trials", arm_trials, "Trials per session (default 20)");
  run_arm->add_flag("--tape", arm_tape, "Also write event tapes");

  // analyze / report
  std::string an_in, an_out;
  std::optional<double> an_exclude;
  bool an_outbound = false, an_nominal = false;
  auto* analyze = app.add_subcommand("analyze", "Fitts analysis of session logs to CSV");
  analyze->add_option("--in", an_in, "Log file or directory")->required();
  analyze->add_option("--out", an_out, "CSV output path");
  analyze->add_option("--exclude-over", an_exclude, "Drop trials slower than this many seconds");
  analyze->add_flag("--outbound-only", an_outbound, "Ignore reaches back to the center");
  analyze->add_flag("--nominal", an_nominal, "Regress on nominal instead of effective ID");

  std::string rep_in;
  double rep_limit = 25.0;
  bool rep_outbound = false;
  auto* report = app.add_subcommand("report", "Text report with and without the slow-trial exclusion");
  report->add_option("--in", rep_in, "Log file or directory")->required();
  report->add_option("--exclude-over", rep_limit, "Exclusion limit in seconds");
  report->add_flag("--outbound-only", rep_outbound, "Ignore reaches back to the center");

  // replay
  std::string rp_tape, rp_out;
  auto* replay_cmd = app.add_subcommand("replay", "Rebuild a session log from an event tape");
  replay_cmd->add_option("--tape", rp_tape, "Event tape")->required();
  replay_cmd->add_option("--out", rp_out, "Output log (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      SessionConfig c = base_config(serve_src, session_mode_from_string(serve_mode));
      c.log_path = serve_log;
      c.realtime_factor = realtime;
      c.session_id = "live";
      MessageHub hub;
      Session session(c, &hub);
      LiveServer server(
          hub, [&session](const std::string& text) { session.submit(parse_client_command(text)); },
          [&session] { return session.hello_message(); }, port);
      std::cout << "serving ws://127.0.0.1:" << server.port() << "/" << std::endl;
      const SessionLog log = session.run();
      print_summary(log, c.log_path);
      std::this_thread::sleep_for(std::chrono::duration<double>(linger));
      server.stop();
      return 0;
    }
    if (*simulate) {
      NoiseModel noise;
      noise.sigma_ax = noise.sigma_ay = noise.sigma_az = sim_tilt;
      noise.sigma_stretch = sim_stretch;
      noise.dropout_probability = sim_drop;
      noise.seed = sim_seed;
      const auto frames = synthesize(load_script_file(sim_script), noise, sim_rate);
      const WireStream wire = stream_over_wire(frames, sim_corrupt, sim_seed);
      write_text_file(sim_out, std::string(wire.bytes.begin(), wire.bytes.end()));
      std::cout << frames.size() << " frames, " << wire.bytes.size() << " bytes, " << wire.corrupted.size()
                << " corrupted -> " << sim_out << '\n';
      return 0;
    }
    if (*calibrate) {
      std::string path = cal_profile.empty() ? default_profile_path() : cal_profile;
      CalibrationProfile profile;
      if (!cal_init && !path.empty() && fs::exists(path)) profile = load_profile_file(path);
      ProfileUpdate update;
      for (const auto& kv : cal_set) {
        const auto eq = kv.find('=');
        const auto v = eq == std::string::npos ? std::nullopt : parse_double(kv.substr(eq + 1));
        if (!v) throw ConfigError("--set expects key=number, got '" + kv + "'");
        update[kv.substr(0, eq)] = *v;
      }
      profile = merge_update(profile, update);
      if (!path.empty() && (cal_init || !update.empty())) {
        if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
        save_profile_file(profile, path);
        std::cerr << "wrote " << path << '\n';
      }
      std::cout << save_profile(profile);
      return 0;
    }
    if (*run_pointing) {
      return run_task(SessionMode::kPointing, pt_src, pt_n, pt_out, pt_cohort, pt_tape, pt_seed, 0);
    }
    if (*run_arm) {
      return run_task(SessionMode::kArm3D, arm_src, arm_n, arm_out, arm_cohort, arm_tape, arm_seed, arm_trials);
    }
    if (*analyze) {
      ReportOptions opt;
      opt.exclude_over_s = an_exclude;
      opt.grouping.include_returns = !an_outbound;
      opt.regressor = an_nominal ? Regressor::kNominal : Regressor::kEffective;
      const Report r = build_report(load_logs(an_in), opt);
      if (!an_out.empty()) write_text_file(an_out, report_csv(r));
      std::cout << report_text(r);
      return 0;
    }
    if (*report) {
      const auto logs = load_logs(rep_in);
      ReportOptions opt;
      opt.grouping.include_returns = !rep_outbound;
      std::cout << report_text(build_report(logs, opt)) << '\n';
      opt.exclude_over_s = rep_limit;
      std::cout << report_text(build_report(logs, opt));
      return 0;
    }
    if (*replay_cmd) {
      const std::string text = serialize(replay(parse_event_tape(read_text_file(rp_tape))));
      if (rp_out.empty()) std::cout << text;
      else write_text_file(rp_out, text);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
