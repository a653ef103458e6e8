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

#include "mentum/agent.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>

#include "mentum/error.h"
#include "mentum/text.h"
#include "mentum/translator.h"

namespace mentum {

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

std::mt19937_64 seeded(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x6d656e74u};
  return std::mt19937_64(seq);
}

std::uint64_t ms(double seconds) { return static_cast<std::uint64_t>(std::llround(seconds * 1000.0)); }

}  // namespace

void validate(const AgentParams& p) {
  if (!(p.b_true > 0.0) || !std::isfinite(p.b_true)) throw ConfigError("agent b must be positive");
  if (!std::isfinite(p.a_true)) throw ConfigError("agent a must be finite");
  if (!(p.endpoint_sigma_ratio > 0.0) || !std::isfinite(p.endpoint_sigma_ratio)) {
    throw ConfigError("agent endpoint sigma ratio must be positive");
  }
  if (!(p.misclick_rate >= 0.0 && p.misclick_rate < 1.0)) throw ConfigError("agent misclick rate must be in [0, 1)");
  if (!finite_nonneg(p.time_noise_ratio)) throw ConfigError("agent time noise must be non-negative");
  if (!(p.reaction_fraction >= 0.0 && p.reaction_fraction < 0.9)) {
    throw ConfigError("agent reaction fraction must be in [0, 0.9)");
  }
  if (!(p.move_rate_hz > 0.0) || !(p.arm_tick_hz > 0.0)) throw ConfigError("agent update rates must be positive");
  if (!finite_nonneg(p.misclick_halt_s)) throw ConfigError("agent misclick halt must be non-negative");
  if (!(p.stall_probability >= 0.0 && p.stall_probability <= 1.0)) {
    throw ConfigError("agent stall probability must be in [0, 1]");
  }
  if (!finite_nonneg(p.stall_exponent) || !finite_nonneg(p.stall_min_s) || !(p.stall_max_s >= p.stall_min_s)) {
    throw ConfigError("agent stall range is invalid");
  }
  if (!(p.arm_speed_m_s >= 0.0) || !finite_nonneg(p.arm_overhead_s)) {
    throw ConfigError("agent arm speed and overhead must be non-negative");
  }
}

AgentParams parse_agent_spec(const std::string& spec) {
  AgentParams p;
  for (std::string_view item : split(spec, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ConfigError("agent option '" + std::string(item) + "' needs key=value");
    const std::string key(trim(item.substr(0, eq)));
    const std::string_view text = trim(item.substr(eq + 1));
    const std::optional<double> v = parse_double(text);
    if (!v) throw ConfigError("agent option " + key + " has a non-numeric value");
    if (key == "a") p.a_true = *v;
    else if (key == "b") p.b_true = *v;
    else if (key == "sigma") p.endpoint_sigma_ratio = *v;
    else if (key == "misclick") p.misclick_rate = *v;
    else if (key == "seed") {
      if (*v < 0 || *v != std::floor(*v)) throw ConfigError("agent seed must be a non-negative integer");
      p.seed = static_cast<std::uint64_t>(*v);
    } else if (key == "noise") p.time_noise_ratio = *v;
    else if (key == "stall") p.stall_probability = *v;
    else if (key == "stall_exp") p.stall_exponent = *v;
    else if (key == "stall_min") p.stall_min_s = *v;
    else if (key == "stall_max") p.stall_max_s = *v;
    else if (key == "speed") p.arm_speed_m_s = *v;
    else if (key == "overhead") p.arm_overhead_s = *v;
    else throw ConfigError("unknown agent option '" + key + "'");
  }
  validate(p);
  return p;
}

std::string agent_spec(const AgentParams& p) {
  return "a=" + format_double(p.a_true) + ",b=" + format_double(p.b_true) +
         ",sigma=" + format_double(p.endpoint_sigma_ratio) + ",misclick=" + format_double(p.misclick_rate) +
         ",seed=" + std::to_string(p.seed) + ",noise=" + format_double(p.time_noise_ratio) +
         ",stall=" + format_double(p.stall_probability) + ",speed=" + format_double(p.arm_speed_m_s) +
         ",overhead=" + format_double(p.arm_overhead_s);
}

double max_grid_id() { return std::log2(kTargetDistances[2] / kTargetWidths[0] + 1.0); }

PointingView view_of(const PointingTask& task) {
  return {task.pointer(), task.active_target_pos(), task.active_target().width, task.active_target().distance,
          task.onset_t()};
}

// ---------------------------------------------------------------------------

PointingAgent::PointingAgent(const AgentParams& params) : params_(params), rng_(seeded(params.seed, 0)) {
  validate(params_);
}

double PointingAgent::sample_time_s(double id) {
  const double mean = params_.a_true + params_.b_true * id;
  double t = mean;
  if (params_.time_noise_ratio > 0.0) {
    std::normal_distribution<double> noise(mean, params_.time_noise_ratio * std::abs(mean));
    do {
      t = noise(rng_);
    } while (!(t > 0.0));
  }
  return t;
}

Vec2 PointingAgent::sample_endpoint(Vec2 center, double width) {
  std::normal_distribution<double> scatter(0.0, params_.endpoint_sigma_ratio * width);
  for (;;) {
    const Vec2 p{center.x + scatter(rng_), center.y + scatter(rng_)};
    if (inside_disk(p, center, width)) return p;
  }
}

TrialPlan PointingAgent::act_pointing(const PointingView& view) {
  // All draws happen every trial so that one trial's outcome does not shift
  // the random stream of the next.
  const double id = std::log2(view.distance / view.width + 1.0);
  double t = sample_time_s(id);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const bool stall =
      unit(rng_) < params_.stall_probability * std::pow(std::min(1.0, id / max_grid_id()), params_.stall_exponent);
  const double stall_s = std::uniform_real_distribution<double>(params_.stall_min_s, params_.stall_max_s)(rng_);
  const bool misclick = unit(rng_) < params_.misclick_rate;
  if (stall) t += stall_s;

  TrialPlan plan;
  plan.stalled = stall;
  plan.endpoint = sample_endpoint(view.target_pos, view.width);

  const std::uint64_t total = std::max<std::uint64_t>(ms(t), 4);
  plan.sampled_time_s = static_cast<double>(total) / 1000.0;
  const std::uint64_t t_click = view.onset_t + total;
  const std::uint64_t t_move = view.onset_t + std::max<std::uint64_t>(1, ms(params_.reaction_fraction * t));
  const std::uint64_t t_arrive = std::max(t_move, t_click - std::max<std::uint64_t>(1, total / 10));

  // Movement samples at the agent's update rate, last one exactly on arrival.
  std::vector<std::uint64_t> times;
  const double period = 1000.0 / params_.move_rate_hz;
  for (double s = static_cast<double>(t_move); s < static_cast<double>(t_arrive); s += period) {
    times.push_back(static_cast<std::uint64_t>(std::llround(s)));
  }
  times.push_back(t_arrive);
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const Vec2 from = view.pointer;
  auto planned = [&](std::uint64_t at) {
    if (t_arrive == t_move) return plan.endpoint;
    const double u = static_cast<double>(at - t_move) / static_cast<double>(t_arrive - t_move);
    return Vec2{from.x + u * (plan.endpoint.x - from.x), from.y + u * (plan.endpoint.y - from.y)};
  };

  std::optional<std::uint64_t> press_at;
  std::uint64_t release_at = 0;
  if (misclick && times.size() >= 2) {
    const std::uint64_t mid = times[times.size() / 2 - 1];
    const Vec2 there = planned(mid);
    if (!inside_disk(there, view.target_pos, view.width)) {
      press_at = mid;
      const auto room = (t_arrive - mid) / 2;
      release_at = mid + std::min<std::uint64_t>(ms(params_.misclick_halt_s), room);
      plan.misclick = true;
    }
  }

  Vec2 p = from;
  bool halted = false;
  for (std::uint64_t at : times) {
    if (halted && at <= release_at) continue;
    if (halted) {
      plan.events.push_back(ControlEvent::release(release_at));
      halted = false;
    }
    const Vec2 goal = at == t_arrive ? plan.endpoint : planned(at);
    const double dx = goal.x - p.x;
    const double dy = goal.y - p.y;
    p.x += dx;
    p.y += dy;
    plan.events.push_back(ControlEvent::pointer(at, dx, dy));
    if (press_at && at == *press_at) {
      plan.events.push_back(ControlEvent::press(at));
      halted = true;
    }
  }
  if (halted) plan.events.push_back(ControlEvent::release(release_at));
  plan.events.push_back(ControlEvent::press(t_click));
  plan.events.push_back(ControlEvent::release(t_click));
  return plan;
}

// ---------------------------------------------------------------------------

namespace {

EventTape tape_for(const SessionHeader& header, std::uint64_t start) {
  EventTape tape;
  tape.header = header;
  tape.start_t_ms = start;
  return tape;
}

}  // namespace

AgentRun run_pointing_agent(const AgentParams& params, SessionHeader header) {
  header.mode = SessionMode::kPointing;
  if (header.source.empty()) header.source = "agent:" + agent_spec(params);
  AgentRun run;
  run.tape = tape_for(header, kAgentStartMs);
  run.log.header = header;

  PointingAgent agent(params);
  PointingTask task(header.pointing);
  task.start(kAgentStartMs);
  while (!task.finished()) {
    TrialPlan plan = agent.act_pointing(view_of(task));
    int records = 0;
    for (const ControlEvent& e : plan.events) {
      run.tape.entries.emplace_back(e);
      if (auto rec = task.step(e)) {
        run.log.pointing_trials.push_back(std::move(*rec));
        ++records;
      }
    }
    if (records != 1) throw TaskError("agent plan did not complete exactly one reach");
    run.sampled_times_s.push_back(plan.sampled_time_s);
  }
  run.log.complete = true;
  return run;
}

AgentRun run_arm_agent(const AgentParams& params, SessionHeader header) {
  validate(params);
  header.mode = SessionMode::kArm3D;
  if (header.source.empty()) header.source = "agent:" + agent_spec(params);
  AgentRun run;
  run.tape = tape_for(header, kAgentStartMs);
  run.log.header = header;

  ArmTask task(header.arm);
  task.start(kAgentStartMs);
  const double gain = header.arm.gain_m_per_px;
  const auto period = std::max<std::uint64_t>(1, ms(1.0 / params.arm_tick_hz));
  const std::uint64_t overhead = ms(params.arm_overhead_s);

  int seen_trial = -1;
  std::uint64_t move_after = 0;
  std::uint64_t t = kAgentStartMs;
  auto keep = [&](std::optional<TrialRecord3D> rec) {
    if (rec) run.log.arm_trials.push_back(std::move(*rec));
  };
  const std::uint64_t deadline = kAgentStartMs + 3'600'000ull * 24;
  while (!task.finished()) {
    if (task.trial_index() != seen_trial) {
      seen_trial = task.trial_index();
      move_after = std::max(t, task.now()) + overhead;
    }
    t += period;
    if (t > deadline) throw TaskError("arm agent did not finish within a simulated day");
    const Vec3 goal = task.active_sphere_center();
    const Vec3 at = task.endpoint();
    const double dist = distance(goal, at);
    if (t < move_after || dist < 1e-12) {
      run.tape.entries.emplace_back(Tick{t});
      keep(task.advance(t));
      continue;
    }
    const double reach = params.arm_speed_m_s > 0.0 ? params.arm_speed_m_s * static_cast<double>(period) / 1000.0
                                                     : std::numeric_limits<double>::infinity();
    const double u = dist <= reach ? 1.0 : reach / dist;
    const ControlEvent xy = ControlEvent::pointer(t, (goal.x - at.x) * u / gain, (goal.y - at.y) * u / gain);
    const ControlEvent z = ControlEvent::z(t, (goal.z - at.z) * u);
    run.tape.entries.emplace_back(xy);
    keep(task.step(xy));
    run.tape.entries.emplace_back(z);
    keep(task.step(z));
  }
  run.log.complete = true;
  return run;
}

namespace {

template <typename Fn>
std::vector<AgentRun> run_cohort(const AgentParams& params, int participants, const SessionHeader& header, Fn fn) {
  if (participants <= 0) throw ConfigError("cohort needs at least one participant");
  std::vector<std::future<AgentRun>> jobs;
  for (int i = 0; i < participants; ++i) {
    AgentParams p = params;
    p.seed = params.seed * 1000 + static_cast<std::uint64_t>(i);
    SessionHeader h = header;
    char name[16];
    std::snprintf(name, sizeof name, "p%02d", i + 1);
    h.participant = name;
    h.session_id = (header.session_id.empty() ? header.cohort : header.session_id) + "-" + name;
    h.pointing.seed = header.pointing.seed * 1000 + static_cast<std::uint64_t>(i);
    h.arm.seed = header.arm.seed * 1000 + static_cast<std::uint64_t>(i);
    jobs.push_back(std::async(std::launch::async, fn, p, h));
  }
  std::vector<AgentRun> runs;
  for (auto& j : jobs) runs.push_back(j.get());
  return runs;
}

}  // namespace

std::vector<AgentRun> run_pointing_cohort(const AgentParams& params, int participants, const SessionHeader& header) {
  return run_cohort(params, participants, header, run_pointing_agent);
}

std::vector<AgentRun> run_arm_cohort(const AgentParams& params, int participants, const SessionHeader& header) {
  return run_cohort(params, participants, header, run_arm_agent);
}

// ---------------------------------------------------------------------------
// Sensor level

namespace {

constexpr double kFullTilt = 1000.0;
constexpr double kFineTilt = 450.0;
constexpr double kCoarseBand = 60.0;  // px: beyond this, steer at full tilt
constexpr int kSettleFrames = 3;

// One closed-loop sensor rig: frames are synthesized one period at a time and
// pass through the wire codec before reaching the pipeline.
class SensorRig {
 public:
  SensorRig(const CalibrationProfile& profile, double rate_hz) : pipeline_(profile), rate_hz_(rate_hz) {
    period_ms_ = 1000.0 / rate_hz;
  }

  std::vector<ControlEvent> emit(double ax, double ay, double stretch) {
    GestureSegment seg;
    seg.duration_ms = period_ms_;
    seg.ax = ax;
    seg.ay = ay;
    seg.stretch = stretch;
    script_.segments.push_back(seg);

    std::vector<SensorFrame> one = synthesize(GestureScript{{seg}}, NoiseModel{}, rate_hz_);
    std::vector<ControlEvent> events;
    for (SensorFrame f : one) {
      f.seq = static_cast<std::uint16_t>(frames_.size());
      f.t_ms = static_cast<std::uint64_t>(std::llround(static_cast<double>(frames_.size() + 1) * period_ms_));
      frames_.push_back(f);
      const WireFrame wire = encode_frame(f);
      for (const SensorFrame& decoded : decoder_.decode(wire)) {
        auto out = pipeline_.process(decoded);
        events.insert(events.end(), out.begin(), out.end());
      }
    }
    return events;
  }

  std::uint64_t now() const {
    return static_cast<std::uint64_t>(std::llround(static_cast<double>(frames_.size()) * period_ms_));
  }
  GestureScript& script() { return script_; }
  std::vector<SensorFrame>& frames() { return frames_; }

 private:
  Pipeline pipeline_;
  StreamDecoder decoder_;
  double rate_hz_;
  double period_ms_ = 10.0;
  GestureScript script_;
  std::vector<SensorFrame> frames_;
};

double tilt_for(double err, double tol, bool coarse_allowed) {
  if (std::abs(err) <= tol) return 0.0;
  const double mag = coarse_allowed && std::abs(err) > kCoarseBand ? kFullTilt : kFineTilt;
  return err > 0 ? mag : -mag;
}

}  // namespace

SensorRun run_pointing_sensor_agent(const AgentParams& params, SessionHeader header, double rate_hz) {
  validate(params);
  if (!(rate_hz >= kMinStreamRateHz && rate_hz <= kMaxStreamRateHz)) {
    throw ConfigError("sensor agent rate must be within the device stream range");
  }
  header.mode = SessionMode::kPointing;
  if (header.source.empty()) header.source = "sensor-agent:" + agent_spec(params);

  SensorRun run;
  run.log.header = header;
  run.tape.header = header;
  run.tape.start_t_ms = 0;

  PointingAgent agent(params);
  SensorRig rig(header.profile, rate_hz);
  PointingTask task(header.pointing);
  task.start(0);

  const auto frame_budget = static_cast<std::size_t>(rate_hz * 600.0);  // per reach
  auto feed = [&](double ax, double ay, double stretch, bool& pressed, bool& released, bool& moved_x,
                  bool& moved_y) -> bool {
    bool completed = false;
    for (const ControlEvent& e : rig.emit(ax, ay, stretch)) {
      run.tape.entries.emplace_back(e);
      if (e.kind == EventKind::kClickPress) pressed = true;
      if (e.kind == EventKind::kClickRelease) released = true;
      if (e.kind == EventKind::kPointerDelta) {
        moved_x = moved_x || e.dx != 0.0;
        moved_y = moved_y || e.dy != 0.0;
      }
      if (auto rec = task.step(e)) {
        run.log.pointing_trials.push_back(std::move(*rec));
        completed = true;
      }
    }
    return completed;
  };

  while (!task.finished()) {
    const PointingView view = view_of(task);
    // The plan supplies the timing, aim point and misclick decision; its
    // event tape is not used at this level.
    const TrialPlan plan = agent.act_pointing(view);
    run.sampled_times_s.push_back(plan.sampled_time_s);
    const double tol = view.width / 4.0;
    Vec2 aim = plan.endpoint;
    // Aim well inside the disk: steering stops anywhere within tol of it.
    if (distance(aim, view.target_pos) >= view.width / 4.0) {
      const double k = (view.width / 4.0) * 0.999 / distance(aim, view.target_pos);
      aim = {view.target_pos.x + (aim.x - view.target_pos.x) * k, view.target_pos.y + (aim.y - view.target_pos.y) * k};
    }
    const std::uint64_t t_move = view.onset_t + std::max<std::uint64_t>(1, ms(params.reaction_fraction * plan.sampled_time_s));
    const std::uint64_t t_click = view.onset_t + ms(plan.sampled_time_s);
    bool misclick_pending = plan.misclick;

    enum class Phase { kWait, kSteer, kMisclickPress, kMisclickRelease, kHold, kPress, kRelease } phase = Phase::kWait;
    int idle_x = 0, idle_y = 0;
    bool pulse_x = false, pulse_y = false;
    bool done = false;
    for (std::size_t frames = 0; !done; ++frames) {
      if (frames > frame_budget) throw TaskError("sensor agent failed to converge on a target");
      bool pressed = false, released = false, moved_x = false, moved_y = false;
      const Vec2 p = task.pointer();
      const double ex = aim.x - p.x;
      const double ey = aim.y - p.y;
      double ax = 0.0, ay = 0.0, stretch = 0.0;

      switch (phase) {
        case Phase::kWait:
          if (rig.now() >= t_move) phase = Phase::kSteer;
          break;
        case Phase::kSteer: {
          if (misclick_pending && std::hypot(ex, ey) < view.distance / 2.0 &&
              !inside_disk(p, view.target_pos, view.width)) {
            misclick_pending = false;
            phase = Phase::kMisclickPress;
            break;
          }
          const double axis_tol = tol / std::sqrt(2.0);
          // Far away: continuous steering. Close in: short pulses, each
          // ended as soon as the axis moves, then a pause to let it settle.
          const bool coarse_x = std::abs(ex) > kCoarseBand;
          const bool coarse_y = std::abs(ey) > kCoarseBand;
          if (coarse_x) ax = tilt_for(ex, axis_tol, true);
          else if (idle_x >= kSettleFrames && !pulse_x) ax = tilt_for(ex, axis_tol, false);
          else if (pulse_x) ax = tilt_for(ex, axis_tol, false);
          if (coarse_y) ay = tilt_for(ey, axis_tol, true);
          else if (idle_y >= kSettleFrames && !pulse_y) ay = tilt_for(ey, axis_tol, false);
          else if (pulse_y) ay = tilt_for(ey, axis_tol, false);
          pulse_x = !coarse_x && ax != 0.0;
          pulse_y = !coarse_y && ay != 0.0;
          if (std::abs(ex) <= axis_tol && std::abs(ey) <= axis_tol && idle_x >= kSettleFrames &&
              idle_y >= kSettleFrames) {
            phase = Phase::kHold;
            ax = ay = 0.0;
          }
          break;
        }
        case Phase::kMisclickPress:
          stretch = kFullTilt;
          break;
        case Phase::kMisclickRelease:
          break;
        case Phase::kHold:
          if (rig.now() + 2 * static_cast<std::uint64_t>(1000.0 / rate_hz) >= t_click) phase = Phase::kPress;
          if (phase != Phase::kPress) break;
          [[fallthrough]];
        case Phase::kPress:
          stretch = kFullTilt;
          break;
        case Phase::kRelease:
          break;
      }

      const bool completed = feed(ax, ay, stretch, pressed, released, moved_x, moved_y);
      idle_x = moved_x ? 0 : idle_x + 1;
      idle_y = moved_y ? 0 : idle_y + 1;
      if (moved_x) pulse_x = false;
      if (moved_y) pulse_y = false;

      if (phase == Phase::kMisclickPress && pressed) phase = Phase::kMisclickRelease;
      else if (phase == Phase::kMisclickRelease && released) phase = Phase::kSteer;
      else if (phase == Phase::kPress && completed) phase = Phase::kRelease;
      else if (phase == Phase::kPress && pressed) {
        // Drifted out before the click landed: release and steer again.
        phase = Phase::kMisclickRelease;
      }
      if (phase == Phase::kRelease && released) done = true;
    }
  }

  run.script = rig.script();
  run.frames = rig.frames();
  run.log.complete = true;
  return run;
}

}  // namespace mentum
