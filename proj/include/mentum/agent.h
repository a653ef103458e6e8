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

// Synthetic operators with known ground truth. The pointing agent times each
// reach as a_true + b_true * log2(D / W + 1) plus Gaussian noise and lands
// with isotropic scatter around the target center; the arm agent travels in
// straight lines at a bounded speed and holds still while dwelling.
//
// Agents drive the task engine directly with ControlEvents. The sensor-level
// pointing agent instead produces gesture segments that go through the wire
// codec and the signal pipeline, closing the loop on the observed pointer.

#ifndef MENTUM_AGENT_H_
#define MENTUM_AGENT_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mentum/device_sim.h"
#include "mentum/session_log.h"
#include "mentum/task_engine.h"

namespace mentum {

struct AgentParams {
  double a_true = 0.5;   // s
  double b_true = 2.0;   // s/bit
  double endpoint_sigma_ratio = 0.12;
  double misclick_rate = 0.0;
  std::uint64_t seed = 1;

  // Gaussian time noise, sigma as a fraction of the mean trial time.
  double time_noise_ratio = 0.05;
  // Share of the trial spent before the pointer starts moving.
  double reaction_fraction = 0.25;
  double move_rate_hz = 20.0;
  double misclick_halt_s = 0.2;

  // Heavy tail: with probability stall_probability * (ID / max ID)^stall_exponent
  // a reach picks up an extra pause drawn uniformly from [stall_min_s, stall_max_s].
  double stall_probability = 0.0;
  double stall_exponent = 4.0;
  double stall_min_s = 26.0;
  double stall_max_s = 60.0;

  // Arm: straight-line travel speed (0 = instantaneous) and the pause at the
  // start of every trial.
  double arm_speed_m_s = 0.05;
  double arm_overhead_s = 0.5;
  double arm_tick_hz = 20.0;

  friend bool operator==(const AgentParams&, const AgentParams&) = default;
};

// Throws ConfigError on b_true <= 0, sigma ratio <= 0, misclick rate outside
// [0, 1) or other out-of-range values.
void validate(const AgentParams& params);

// "a=0.5,b=2.0,sigma=0.12,seed=7". Recognised keys: a, b, sigma, misclick,
// seed, noise, stall, stall_exp, stall_min, stall_max, speed, overhead.
// Unspecified keys keep their defaults.
AgentParams parse_agent_spec(const std::string& spec);
std::string agent_spec(const AgentParams& params);

// Largest nominal ID of the standard grid, log2(300 / 30 + 1).
double max_grid_id();

struct PointingView {
  Vec2 pointer;
  Vec2 target_pos;
  double width = 0.0;
  double distance = 0.0;
  std::uint64_t onset_t = 0;
};

PointingView view_of(const PointingTask& task);

struct TrialPlan {
  std::vector<ControlEvent> events;
  double sampled_time_s = 0.0;  // after millisecond rounding
  Vec2 endpoint;
  bool misclick = false;
  bool stalled = false;
};

class PointingAgent {
 public:
  explicit PointingAgent(const AgentParams& params);

  // Event tape for the active reach, ending with the in-target click.
  TrialPlan act_pointing(const PointingView& view);

  const AgentParams& params() const { return params_; }

 private:
  double sample_time_s(double id);
  Vec2 sample_endpoint(Vec2 center, double width);

  AgentParams params_;
  std::mt19937_64 rng_;
};

struct AgentRun {
  EventTape tape;
  SessionLog log;
  std::vector<double> sampled_times_s;  // one per trial, pointing only
};

inline constexpr std::uint64_t kAgentStartMs = 1000;

// Fills in the header source field and runs the task to completion.
AgentRun run_pointing_agent(const AgentParams& params, SessionHeader header);
AgentRun run_arm_agent(const AgentParams& params, SessionHeader header);

// n participants named p01.., each with its own agent and task seed derived
// from params.seed. Participants run concurrently.
std::vector<AgentRun> run_pointing_cohort(const AgentParams& params, int participants, const SessionHeader& header);
std::vector<AgentRun> run_arm_cohort(const AgentParams& params, int participants, const SessionHeader& header);

// ---------------------------------------------------------------------------
// Sensor level

struct SensorRun {
  GestureScript script;
  std::vector<SensorFrame> frames;
  EventTape tape;  // events as produced by the pipeline
  SessionLog log;
  std::vector<double> sampled_times_s;
};

// Pointing session driven through frames: gesture chunks of one frame period
// are synthesized, sent over the wire, decoded and translated with the header
// profile; tilt and stretch are chosen from the pointer the task reports. The
// agent waits out the sampled Fitts time before clicking, so times track the
// ground truth whenever steering finishes early. Throws TaskError if a reach
// fails to converge.
SensorRun run_pointing_sensor_agent(const AgentParams& params, SessionHeader header, double rate_hz = 100.0);

}  // namespace mentum

#endif  // MENTUM_AGENT_H_
