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
#include <random>

#include <gtest/gtest.h>

#include "mentum/error.h"
#include "mentum/one_euro.h"
#include "mentum/profile.h"
#include "mentum/translator.h"

namespace mentum {
namespace {

// --- smoothing -------------------------------------------------------------

TEST(OneEuro, ConstantInputConverges) {
  OneEuroFilter f(1.0, 0.0);
  f.filter(0.0, 0.0);
  double y = 0.0;
  for (int i = 0; i < 100; ++i) y = f.filter(250.0, 0.01);
  EXPECT_NEAR(y, 250.0, 2.5);
}

TEST(OneEuro, StepApproachIsMonotoneWithoutOvershoot) {
  for (double beta : {0.0, 0.001, 0.1}) {
    OneEuroFilter f(2.0, beta);
    double prev = f.filter(0.0, 0.0);
    for (int i = 0; i < 500; ++i) {
      const double y = f.filter(1000.0, 0.01);
      ASSERT_GE(y, prev);
      ASSERT_LE(y, 1000.0);
      prev = y;
    }
    EXPECT_NEAR(prev, 1000.0, 1e-6);
  }
}

// With beta = 0 the filter is a first-order IIR low-pass.
std::vector<double> direct_form(const std::vector<double>& x, double fc, double dt) {
  const double tau = 1.0 / (2.0 * std::numbers::pi * fc);
  const double a = dt / (dt + tau);
  std::vector<double> y(x.size());
  y[0] = x[0];
  for (std::size_t i = 1; i < x.size(); ++i) y[i] = y[i - 1] + a * (x[i] - y[i - 1]);
  return y;
}

double steady_amplitude(const std::vector<double>& y) {
  double peak = 0.0;
  for (std::size_t i = y.size() / 2; i < y.size(); ++i) peak = std::max(peak, std::abs(y[i]));
  return peak;
}

TEST(OneEuro, FrequencySelectivity) {
  const double dt = 0.001;
  double attenuation[2];
  int k = 0;
  for (double hz : {0.5, 20.0}) {
    std::vector<double> x;
    for (int i = 0; i < 8000; ++i) x.push_back(std::sin(2 * std::numbers::pi * hz * i * dt));
    OneEuroFilter f(1.0, 0.0);
    std::vector<double> y;
    for (std::size_t i = 0; i < x.size(); ++i) y.push_back(f.filter(x[i], i == 0 ? 0.0 : dt));
    const auto ref = direct_form(x, 1.0, dt);
    for (std::size_t i = 0; i < y.size(); ++i) ASSERT_NEAR(y[i], ref[i], 1e-9);
    attenuation[k++] = 1.0 / steady_amplitude(y);
  }
  EXPECT_GE(attenuation[1], 10.0 * attenuation[0]);
}

TEST(Smoother, DropsNonMonotoneFrames) {
  Smoother s(5.0, 0.0);
  EXPECT_TRUE(s.smooth({0, 10}));
  EXPECT_TRUE(s.smooth({1, 20}));
  EXPECT_FALSE(s.smooth({2, 20}));
  EXPECT_FALSE(s.smooth({3, 15}));
  EXPECT_TRUE(s.smooth({4, 30}));
  EXPECT_EQ(s.dropped(), 2u);
}

// --- translator ------------------------------------------------------------

FilteredFrame frame(std::uint64_t t, double ax = 0, double ay = 0, double stretch = 0, bool button = false) {
  FilteredFrame f;
  f.t_ms = t;
  f.ax = ax;
  f.ay = ay;
  f.stretch = stretch;
  f.button = button;
  return f;
}

TEST(Translate, DeadBandEmitsNothing) {
  CalibrationProfile p;
  TranslatorState s;
  EXPECT_TRUE(translate(p, s, frame(10, 299, -299, 599), 0.01).empty());
  // Ties do not trigger.
  EXPECT_TRUE(translate(p, s, frame(20, p.tilt_pos_x, p.tilt_neg_y, p.stretch_press), 0.01).empty());
}

TEST(Translate, TiltPastThresholdMovesAtSpeed) {
  CalibrationProfile p;
  p.speed_xy = 500;
  TranslatorState s;
  const auto ev = translate(p, s, frame(20, p.tilt_pos_x + 1), 0.02);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, EventKind::kPointerDelta);
  EXPECT_DOUBLE_EQ(ev[0].dx, 10.0);
  EXPECT_DOUBLE_EQ(ev[0].dy, 0.0);
}

TEST(Translate, AxesCombineIndependently) {
  CalibrationProfile p;
  TranslatorState s;
  const auto ev = translate(p, s, frame(20, -400, 400), 0.01);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_DOUBLE_EQ(ev[0].dx, -5.0);
  EXPECT_DOUBLE_EQ(ev[0].dy, 5.0);
}

TEST(Translate, StretchRampGivesOnePressOneRelease) {
  CalibrationProfile p;  // press 600, release 450
  TranslatorState s;
  std::vector<EventKind> clicks;
  std::uint64_t t = 0;
  auto feed = [&](double v) {
    for (const auto& e : translate(p, s, frame(t += 10, 0, 0, v), 0.01)) clicks.push_back(e.kind);
  };
  for (double v = 300; v <= 800; v += 10) feed(v);
  for (double v = 800; v >= 300; v -= 10) feed(v);
  ASSERT_EQ(clicks.size(), 2u);
  EXPECT_EQ(clicks[0], EventKind::kClickPress);
  EXPECT_EQ(clicks[1], EventKind::kClickRelease);
}

TEST(Translate, OscillationInsideHysteresisBandIsSilent) {
  CalibrationProfile p;
  TranslatorState s;
  translate(p, s, frame(10, 0, 0, 700), 0.01);
  ASSERT_TRUE(s.click_down);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> band(p.stretch_release + 1e-9, p.stretch_press);
  for (int i = 0; i < 5000; ++i) {
    ASSERT_TRUE(translate(p, s, frame(20 + 10 * i, 0, 0, band(rng)), 0.01).empty());
  }
}

TEST(Translate, ClicksAlternateStartingWithPress) {
  CalibrationProfile p;
  std::mt19937_64 rng(4);
  for (int round = 0; round < 50; ++round) {
    TranslatorState s;
    double v = 0;
    EventKind last = EventKind::kClickRelease;
    for (int i = 0; i < 2000; ++i) {
      v = std::clamp(v + std::normal_distribution<double>(0, 60)(rng), 0.0, 1023.0);
      const bool button = rng() % 50 == 0;
      for (const auto& e : translate(p, s, frame(10 * (i + 1), 0, 0, v, button), 0.01)) {
        if (e.kind != EventKind::kClickPress && e.kind != EventKind::kClickRelease) continue;
        ASSERT_NE(e.kind, last);
        last = e.kind;
      }
      ASSERT_EQ(s.click_down, last == EventKind::kClickPress);
    }
  }
}

TEST(Translate, SpeedIsAHardBound) {
  CalibrationProfile p;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> tilt(-2000, 2000);
  TranslatorState s;
  for (int i = 0; i < 10000; ++i) {
    const double dt = 0.001 * (1 + rng() % 50);
    for (const auto& e : translate(p, s, frame(i + 1, tilt(rng), tilt(rng)), dt)) {
      ASSERT_LE(std::abs(e.dx), p.speed_xy * dt + 1e-12);
      ASSERT_LE(std::abs(e.dy), p.speed_xy * dt + 1e-12);
    }
  }
}

TEST(Translate, ZeroInputNeverMoves) {
  CalibrationProfile p;
  Pipeline pipe(p);
  for (int i = 0; i < 20000; ++i) {
    SensorFrame f;
    f.seq = static_cast<std::uint16_t>(i);
    f.t_ms = 10u * (i + 1);
    ASSERT_TRUE(pipe.process(f).empty());
  }
}

TEST(Translate, DeterministicForSameInput) {
  std::mt19937_64 rng(9);
  std::vector<SensorFrame> frames;
  for (int i = 0; i < 3000; ++i) {
    SensorFrame f;
    f.seq = static_cast<std::uint16_t>(i);
    f.t_ms = 10u * (i + 1);
    f.ax = static_cast<std::int16_t>(rng() % 1600) - 800;
    f.ay = static_cast<std::int16_t>(rng() % 1600) - 800;
    f.stretch = static_cast<std::uint16_t>(rng() % 1024);
    f.button = rng() % 100 == 0;
    frames.push_back(f);
  }
  auto run = [&] {
    Pipeline pipe(CalibrationProfile{});
    std::vector<ControlEvent> all;
    for (const auto& f : frames) {
      auto ev = pipe.process(f);
      all.insert(all.end(), ev.begin(), ev.end());
    }
    return all;
  };
  EXPECT_EQ(run(), run());
}

TEST(Translate, DebounceCollapsesRapidEdges) {
  CalibrationProfile p;
  p.debounce_ms = 50;
  TranslatorState s;
  int toggles = 0;
  // Button chatter: edges every 20 ms for 60 ms, then a clean press 500 ms later.
  const bool pattern[] = {true, false, true, false, true, false};
  std::uint64_t t = 0;
  for (bool b : pattern) {
    for (const auto& e : translate(p, s, frame(t += 10, 0, 0, 0, b), 0.01)) toggles += e.kind == EventKind::kModeToggle;
  }
  for (const auto& e : translate(p, s, frame(t += 500, 0, 0, 0, true), 0.5)) toggles += e.kind == EventKind::kModeToggle;
  EXPECT_EQ(s.button_rising_edges, 4u);
  EXPECT_EQ(toggles, 2);  // the first chatter edge and the clean press
  EXPECT_LE(s.toggles, s.button_rising_edges);
}

TEST(Translate, ReleasedModeEmitsNoMotion) {
  CalibrationProfile p;
  TranslatorState s;
  auto ev = translate(p, s, frame(10, 0, 0, 0, true), 0.01);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, EventKind::kModeToggle);
  EXPECT_EQ(s.mode(), TranslatorMode::kReleased);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(translate(p, s, frame(20 + 10 * i, 900, 900, 900), 0.01).empty());
  // Second press re-engages.
  translate(p, s, frame(2000, 0, 0, 0, false), 0.01);
  translate(p, s, frame(2100, 0, 0, 0, true), 0.01);
  EXPECT_EQ(s.mode(), TranslatorMode::kPointing);
  EXPECT_FALSE(translate(p, s, frame(2110, 900), 0.01).empty());
}

TEST(Translate, ReleasingWhileClickHeldReleasesFirst) {
  CalibrationProfile p;
  TranslatorState s;
  translate(p, s, frame(10, 0, 0, 900), 0.01);
  ASSERT_TRUE(s.click_down);
  const auto ev = translate(p, s, frame(20, 0, 0, 900, true), 0.01);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].kind, EventKind::kClickRelease);
  EXPECT_EQ(ev[1].kind, EventKind::kModeToggle);
}

TEST(Translate, ArmModeStretchDrivesZ) {
  CalibrationProfile p;  // press 600, release 450, press_down 150, speed_z 0.1
  TranslatorState s(ControlMode::kArm3D);
  auto up = translate(p, s, frame(10, 0, 0, 700), 0.01);
  ASSERT_EQ(up.size(), 1u);
  EXPECT_EQ(up[0].kind, EventKind::kZDelta);
  EXPECT_DOUBLE_EQ(up[0].dz, 0.001);
  // Still latched high inside the hysteresis band.
  EXPECT_DOUBLE_EQ(translate(p, s, frame(20, 0, 0, 500), 0.01).at(0).dz, 0.001);
  // Neutral band: nothing.
  EXPECT_TRUE(translate(p, s, frame(30, 0, 0, 300), 0.01).empty());
  auto down = translate(p, s, frame(40, 0, 0, 100), 0.01);
  ASSERT_EQ(down.size(), 1u);
  EXPECT_DOUBLE_EQ(down[0].dz, -0.001);
  // No click events in arm mode.
  for (const auto& e : translate(p, s, frame(50, 0, 0, 900), 0.01)) EXPECT_EQ(e.kind, EventKind::kZDelta);
}

TEST(Translate, InvalidProfileIsConfigError) {
  CalibrationProfile p;
  p.stretch_release = p.stretch_press;
  TranslatorState s;
  EXPECT_THROW(translate(p, s, frame(10), 0.01), ConfigError);
}

TEST(Pipeline, ProfileSwapTakesEffectAtNextFrame) {
  CalibrationProfile p;
  Pipeline pipe(p);
  // Settle the filter at 650 counts: above press 600.
  std::vector<ControlEvent> ev;
  SensorFrame f;
  f.stretch = 650;
  for (int i = 0; i < 200; ++i) {
    f.seq = static_cast<std::uint16_t>(i);
    f.t_ms = 10u * (i + 1);
    for (const auto& e : pipe.process(f)) ev.push_back(e);
  }
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].kind, EventKind::kClickPress);

  CalibrationProfile q = p;
  q.stretch_press = 900;
  q.stretch_release = 700;  // 650 now sits below release
  pipe.set_profile(q);
  EXPECT_EQ(pipe.profile().stretch_press, 600);  // not yet
  f.t_ms += 10;
  const auto after = pipe.process(f);
  EXPECT_EQ(pipe.profile().stretch_press, 900);
  ASSERT_EQ(after.size(), 1u);
  EXPECT_EQ(after[0].kind, EventKind::kClickRelease);

  CalibrationProfile bad = q;
  bad.stretch_release = 950;
  EXPECT_THROW(pipe.set_profile(bad), ConfigError);
  EXPECT_EQ(pipe.profile(), q);
}

// --- profile text ----------------------------------------------------------

TEST(Profile, DefaultRoundTrip) {
  const CalibrationProfile p;
  EXPECT_EQ(load_profile(save_profile(p)), p);
}

TEST(Profile, RoundTripWithUnknownKeys) {
  CalibrationProfile p;
  p.tilt_pos_x = 321.5;
  p.speed_z = 0.0625;
  p.extra = {{"gui_color", "teal"}, {"note", "left side"}};
  const CalibrationProfile q = load_profile(save_profile(p));
  EXPECT_EQ(q, p);
  EXPECT_EQ(save_profile(q), save_profile(p));
}

TEST(Profile, ReleaseNotBelowPressIsRejected) {
  CalibrationProfile p;
  std::string text = save_profile(p);
  const auto at = text.find("stretch_release=");
  const auto end = text.find('\n', at);
  text.replace(at, end - at, "stretch_release=600");
  EXPECT_THROW(load_profile(text), ConfigError);
}

TEST(Profile, ReorderedKeysParseFieldByField) {
  const std::string text =
      "# hand written\n"
      "debounce_ms = 40\n"
      "speed_z=0.2\n"
      "speed_xy=350\n"
      "filter_beta=0.01\n"
      "filter_min_cutoff=3\n"
      "stretch_press_down=100\n"
      "stretch_release=400\n"
      "stretch_press=650\n"
      "tilt_neg_y=-250\n"
      "tilt_pos_y=260\n"
      "tilt_neg_x=-270\n"
      "tilt_pos_x=280\n";
  const CalibrationProfile p = load_profile(text);
  EXPECT_EQ(p.tilt_pos_x, 280);
  EXPECT_EQ(p.tilt_neg_x, -270);
  EXPECT_EQ(p.tilt_pos_y, 260);
  EXPECT_EQ(p.tilt_neg_y, -250);
  EXPECT_EQ(p.stretch_press, 650);
  EXPECT_EQ(p.stretch_release, 400);
  EXPECT_EQ(p.stretch_press_down, 100);
  EXPECT_EQ(p.speed_xy, 350);
  EXPECT_EQ(p.speed_z, 0.2);
  EXPECT_EQ(p.filter_min_cutoff, 3);
  EXPECT_EQ(p.filter_beta, 0.01);
  EXPECT_EQ(p.debounce_ms, 40);
  EXPECT_TRUE(p.extra.empty());
}

TEST(Profile, MissingOrDuplicateKeysRejected) {
  std::string text = save_profile(CalibrationProfile{});
  const auto at = text.find("speed_xy=");
  std::string missing = text;
  missing.erase(at, text.find('\n', at) - at + 1);
  EXPECT_THROW(load_profile(missing), ConfigError);
  EXPECT_THROW(load_profile(text + "speed_xy=10\n"), ConfigError);
  EXPECT_THROW(load_profile(text + "not a pair\n"), ConfigError);
}

TEST(Profile, MergeUpdate) {
  const CalibrationProfile p;
  const CalibrationProfile q = merge_update(p, {{"stretch_press", 700}});
  EXPECT_EQ(q.stretch_press, 700);
  EXPECT_THROW(merge_update(p, {{"stretch_release", 600}}), ConfigError);
  EXPECT_THROW(merge_update(p, {{"no_such_key", 1}}), ConfigError);
  EXPECT_THROW(merge_update(p, {{"speed_xy", 0}}), ConfigError);
}

}  // namespace
}  // namespace mentum
