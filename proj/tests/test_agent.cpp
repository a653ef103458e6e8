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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mentum/agent.h"
#include "mentum/error.h"
#include "mentum/fitts.h"
#include "mentum/stats.h"

namespace mentum {
namespace {

SessionHeader pointing_header(std::uint64_t seed = 1) {
  SessionHeader h;
  h.session_id = "agent-test";
  h.pointing.seed = seed;
  return h;
}

TEST(AgentSpec, ParseAndPrint) {
  const AgentParams p = parse_agent_spec("a=0.3, b=1.5,sigma=0.1,misclick=0.05,seed=9,stall=0.2,speed=0");
  EXPECT_EQ(p.a_true, 0.3);
  EXPECT_EQ(p.b_true, 1.5);
  EXPECT_EQ(p.endpoint_sigma_ratio, 0.1);
  EXPECT_EQ(p.misclick_rate, 0.05);
  EXPECT_EQ(p.seed, 9u);
  EXPECT_EQ(p.stall_probability, 0.2);
  EXPECT_EQ(p.arm_speed_m_s, 0.0);
  EXPECT_EQ(parse_agent_spec(agent_spec(p)), p);
  EXPECT_THROW(parse_agent_spec("b=0"), ConfigError);
  EXPECT_THROW(parse_agent_spec("sigma=-1"), ConfigError);
  EXPECT_THROW(parse_agent_spec("misclick=1"), ConfigError);
  EXPECT_THROW(parse_agent_spec("seed=1.5"), ConfigError);
  EXPECT_THROW(parse_agent_spec("speed"), ConfigError);
  EXPECT_THROW(parse_agent_spec("colour=3"), ConfigError);
}

TEST(Agent, DeterministicPerSeed) {
  AgentParams p;
  p.misclick_rate = 0.1;
  const auto a = run_pointing_agent(p, pointing_header());
  const auto b = run_pointing_agent(p, pointing_header());
  EXPECT_EQ(serialize(a.log), serialize(b.log));
  EXPECT_EQ(serialize(a.tape), serialize(b.tape));
  p.seed = 2;
  EXPECT_NE(serialize(run_pointing_agent(p, pointing_header()).log), serialize(a.log));
}

TEST(Agent, RunIsCompleteAndReplays) {
  AgentParams p;
  p.misclick_rate = 0.2;
  const auto run = run_pointing_agent(p, pointing_header());
  EXPECT_TRUE(run.log.complete);
  ASSERT_EQ(run.log.pointing_trials.size(), 100u);
  EXPECT_TRUE(check_log(run.log).empty());
  EXPECT_EQ(serialize(replay(run.tape)), serialize(run.log));
  ASSERT_EQ(run.sampled_times_s.size(), 100u);
  for (std::size_t i = 0; i < 100; ++i) {
    EXPECT_NEAR(run.log.pointing_trials[i].selection_time_s(), run.sampled_times_s[i], 1e-9);
  }
}

TEST(Agent, TinySigmaLandsOnCenter) {
  AgentParams p;
  p.endpoint_sigma_ratio = 1e-9;
  const auto run = run_pointing_agent(p, pointing_header());
  for (const auto& t : run.log.pointing_trials) {
    EXPECT_NEAR(distance(t.end_pos, t.target_pos), 0.0, 1e-6);
  }
}

TEST(Agent, MisclickRate) {
  AgentParams p;
  p.misclick_rate = 0.2;
  SessionHeader h = pointing_header();
  h.pointing.runs = 200;  // 10^4 reaches
  const auto run = run_pointing_agent(p, h);
  ASSERT_EQ(run.log.pointing_trials.size(), 10000u);
  EXPECT_NEAR(error_rate(run.log.pointing_trials), 20.0, 3.0);
  for (const auto& t : run.log.pointing_trials) {
    for (const auto& m : t.misclicks) EXPECT_FALSE(inside_disk(m.pos, t.target_pos, t.target.width));
  }
}

TEST(Agent, EndpointSpreadFollowsRayleigh) {
  // Isotropic Gaussian scatter with sigma s per axis gives radial distances
  // with SD s * sqrt(2 - pi/2).
  AgentParams p;
  p.endpoint_sigma_ratio = 0.12;
  SessionHeader h = pointing_header();
  h.pointing.runs = 40;
  const auto run = run_pointing_agent(p, h);
  for (const auto& c : condition_stats(run.log.pointing_trials)) {
    const double expected = 0.12 * c.width * std::sqrt(2 - std::numbers::pi / 2);
    EXPECT_NEAR(c.endpoint_sd, expected, 0.1 * expected) << "W=" << c.width << " D=" << c.distance;
  }
}

TEST(Agent, NoiselessTimesFitExactly) {
  AgentParams p;
  p.time_noise_ratio = 0;
  p.a_true = 0.4;
  p.b_true = 0.8;
  const auto run = run_pointing_agent(p, pointing_header());
  const Report r = build_report({run.log}, {.regressor = Regressor::kNominal});
  EXPECT_GT(r.cohorts[0].fit.r_squared, 0.9999);
  EXPECT_NEAR(r.cohorts[0].fit.a, 0.4, 0.002);
  EXPECT_NEAR(r.cohorts[0].fit.b, 0.8, 0.002);
}

TEST(Agent, StallsOnlyAddTime) {
  AgentParams p;
  p.stall_probability = 0.5;
  const auto plain = run_pointing_agent(AgentParams{}, pointing_header());
  const auto stalled = run_pointing_agent(p, pointing_header());
  int slow = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const double extra =
        stalled.log.pointing_trials[i].selection_time_s() - plain.log.pointing_trials[i].selection_time_s();
    EXPECT_GE(extra, -1e-9);
    if (extra > 1e-9) {
      ++slow;
      EXPECT_GE(extra, p.stall_min_s - 1e-3);
      EXPECT_LE(extra, p.stall_max_s + 1e-3);
    }
  }
  EXPECT_GT(slow, 0);
}

TEST(Agent, CohortSeedsDiffer) {
  const auto runs = run_pointing_cohort(AgentParams{}, 3, pointing_header());
  ASSERT_EQ(runs.size(), 3u);
  EXPECT_EQ(runs[0].log.header.participant, "p01");
  EXPECT_NE(serialize(runs[0].log), serialize(runs[1].log));
  EXPECT_NE(runs[0].log.header.session_id, runs[1].log.header.session_id);
  EXPECT_EQ(serialize(runs[2].log), serialize(run_pointing_cohort(AgentParams{}, 3, pointing_header())[2].log));
}

TEST(ArmAgent, InstantMovesTakeTwoDwellsPlusOverhead) {
  AgentParams p;
  p.arm_speed_m_s = 0;
  p.arm_overhead_s = 0.5;
  SessionHeader h;
  const auto run = run_arm_agent(p, h);
  ASSERT_TRUE(run.log.complete);
  ASSERT_EQ(run.log.arm_trials.size(), 20u);
  const double t = mean_completion_time(run.log.arm_trials);
  EXPECT_GE(t, 2.5);
  EXPECT_LE(t, 2.5 + 0.2);
  EXPECT_EQ(serialize(replay(run.tape)), serialize(run.log));
  EXPECT_TRUE(check_log(run.log).empty());
}

TEST(ArmAgent, DefaultSpeedIsDozensOfSeconds) {
  AgentParams p;
  p.arm_speed_m_s = 0.0335;
  p.arm_overhead_s = 0;
  const auto runs = run_arm_cohort(p, 4, SessionHeader{});
  std::vector<SessionLog> logs;
  for (const auto& r : runs) logs.push_back(r.log);
  const Report r = build_report(logs);
  ASSERT_EQ(r.arm.size(), 1u);
  // Two legs of (0.335 - 0.05) m at the given speed, plus two dwells.
  const double expected = 2 * (0.335 - kSphereRadius) / p.arm_speed_m_s + 2;
  EXPECT_NEAR(r.arm[0].mean_completion_s, expected, 0.5);
  EXPECT_DOUBLE_EQ(r.arm[0].success_percent, 100.0);
}

TEST(SensorAgent, CompletesThroughTheWire) {
  AgentParams p;
  p.a_true = 0.6;
  p.b_true = 0.9;
  const SensorRun run = run_pointing_sensor_agent(p, pointing_header());
  EXPECT_TRUE(run.log.complete);
  ASSERT_EQ(run.log.pointing_trials.size(), 100u);
  EXPECT_TRUE(check_log(run.log).empty());
  EXPECT_EQ(serialize(replay(run.tape)), serialize(run.log));
  // Selection time is at least what the agent planned to spend.
  for (std::size_t i = 0; i < 100; ++i) {
    EXPECT_GE(run.log.pointing_trials[i].selection_time_s() + 0.03, run.sampled_times_s[i]);
  }
  const auto frames = synthesize(run.script, {}, 100.0);
  EXPECT_EQ(frames, run.frames);
}

}  // namespace
}  // namespace mentum
