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

// Center-out-center evaluation tasks driven by ControlEvents.
//
// Pointing: alternating reaches from the screen center to a random
// peripheral disk and back, two runs of 50 reaches. A click inside the
// active disk ends the reach; a click outside is logged as a misclick and
// freezes the pointer until the click is released. The selection clock is
// never reset.
//
// Arm: an endpoint in the unit cube must dwell 1 s inside a target sphere,
// then 1 s inside the start sphere. Leaving a sphere resets its dwell timer.

#ifndef MENTUM_TASK_ENGINE_H_
#define MENTUM_TASK_ENGINE_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "mentum/control_event.h"

namespace mentum {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

double distance(Vec2 a, Vec2 b);
double distance(Vec3 a, Vec3 b);

// ---------------------------------------------------------------------------
// Pointing

inline constexpr int kTargetAngles[] = {0, 45, 90, 135, 180, 225, 270, 315};
inline constexpr double kTargetWidths[] = {30.0, 61.0};
inline constexpr double kTargetDistances[] = {122.0, 244.0, 300.0};

// For the center disk `distance` holds the condition distance (that of the
// preceding peripheral reach) and `angle_deg` is unused.
struct TargetSpec2D {
  int angle_deg = 0;
  double width = 0.0;
  double distance = 0.0;
  bool is_center = false;
  friend bool operator==(const TargetSpec2D&, const TargetSpec2D&) = default;
};

// 48 peripheral targets (8 angles x 2 widths x 3 distances) followed by the
// center once per width: 50 entries.
std::vector<TargetSpec2D> generate_target_set_2d();

struct ScreenGeometry {
  double width = 1024.0;
  double height = 768.0;
  Vec2 center() const { return {width / 2.0, height / 2.0}; }
  friend bool operator==(const ScreenGeometry&, const ScreenGeometry&) = default;
};

Vec2 target_center(const TargetSpec2D& target, Vec2 screen_center);

// Strict interior test: distance < width / 2.
bool inside_disk(Vec2 point, Vec2 center, double width);

struct Misclick {
  Vec2 pos;
  std::uint64_t t_ms = 0;
  friend bool operator==(const Misclick&, const Misclick&) = default;
};

struct PathSample {
  std::uint64_t t_ms = 0;
  Vec2 pos;
  friend bool operator==(const PathSample&, const PathSample&) = default;
};

struct TrialRecord2D {
  int index = 0;  // position in the session, 0-based
  int run = 0;
  TargetSpec2D target;
  Vec2 target_pos;
  Vec2 start_pos;
  Vec2 end_pos;
  std::uint64_t onset_t = 0;
  std::uint64_t success_click_t = 0;
  std::vector<Misclick> misclicks;
  std::vector<PathSample> path;

  double selection_time_s() const { return static_cast<double>(success_click_t - onset_t) / 1000.0; }
  friend bool operator==(const TrialRecord2D&, const TrialRecord2D&) = default;
};

struct PointingConfig {
  ScreenGeometry screen;
  int runs = 2;
  int trials_per_run = 50;  // must be even: out, back, out, back, ...
  std::uint64_t seed = 1;
  friend bool operator==(const PointingConfig&, const PointingConfig&) = default;
};

class PointingTask {
 public:
  explicit PointingTask(const PointingConfig& config);

  // Places the pointer at the screen center and shows the first target.
  void start(std::uint64_t t_ms);

  // Throws TaskError before start(). Returns the record of a reach that the
  // event completed. Events after the last reach are ignored.
  std::optional<TrialRecord2D> step(const ControlEvent& event);

  bool started() const { return started_; }
  bool finished() const { return next_ >= schedule_.size(); }
  int total_trials() const { return static_cast<int>(schedule_.size()); }
  int trial_index() const { return static_cast<int>(next_); }
  int run() const;
  Vec2 pointer() const { return pointer_; }
  bool halted() const { return halted_; }
  const TargetSpec2D& active_target() const;
  Vec2 active_target_pos() const;
  std::uint64_t onset_t() const { return onset_t_; }
  const std::vector<TargetSpec2D>& schedule() const { return schedule_; }
  const PointingConfig& config() const { return config_; }

 private:
  PointingConfig config_;
  std::vector<TargetSpec2D> schedule_;
  bool started_ = false;
  std::size_t next_ = 0;
  Vec2 pointer_;
  bool halted_ = false;
  std::uint64_t onset_t_ = 0;
  Vec2 start_pos_;
  std::vector<Misclick> misclicks_;
  std::vector<PathSample> path_;
};

// ---------------------------------------------------------------------------
// Arm

inline constexpr double kSphereRadius = 0.05;
inline constexpr std::uint64_t kDwellMs = 1000;

// 18 targets: two rings of 8 (radius 0.3 m at heights 0.35 and 0.65 m) and
// two polar targets, all around the cube center.
std::vector<Vec3> arm_target_layout();

struct ArmConfig {
  int trials = 20;
  double gain_m_per_px = 1.0 / 500.0;
  Vec3 start{0.5, 0.5, 0.5};
  std::uint64_t seed = 1;
  friend bool operator==(const ArmConfig&, const ArmConfig&) = default;
};

enum class Sphere { kTarget, kStart };

struct Crossing {
  std::uint64_t t_ms = 0;
  Sphere sphere = Sphere::kTarget;
  bool entered = false;
  friend bool operator==(const Crossing&, const Crossing&) = default;
};

struct TrialRecord3D {
  int index = 0;
  bool practice = false;
  Vec3 target;
  std::uint64_t onset_t = 0;
  std::vector<Crossing> crossings;
  std::uint64_t outbound_dwell_t = 0;
  std::uint64_t return_dwell_t = 0;

  double completion_time_s() const { return static_cast<double>(return_dwell_t - onset_t) / 1000.0; }
  friend bool operator==(const TrialRecord3D&, const TrialRecord3D&) = default;
};

class ArmTask {
 public:
  explicit ArmTask(const ArmConfig& config);

  void start(std::uint64_t t_ms);

  // Settles dwell deadlines up to event.t_ms against the current position,
  // then applies the event. Throws TaskError before start().
  std::optional<TrialRecord3D> step(const ControlEvent& event);

  // Lets time pass without motion (the endpoint is held still).
  std::optional<TrialRecord3D> advance(std::uint64_t t_ms);

  bool started() const { return started_; }
  bool finished() const { return next_ >= targets_.size(); }
  int total_trials() const { return static_cast<int>(targets_.size()); }
  int trial_index() const { return static_cast<int>(next_); }
  Vec3 endpoint() const { return endpoint_; }
  bool returning() const { return returning_; }
  Vec3 active_sphere_center() const;
  Vec3 current_target() const;
  // 0..1 progress of the running dwell at time t.
  double dwell_progress(std::uint64_t t_ms) const;
  std::uint64_t now() const { return now_; }
  const ArmConfig& config() const { return config_; }

 private:
  std::optional<TrialRecord3D> settle(std::uint64_t t_ms);
  void update_containment(std::uint64_t t_ms);

  ArmConfig config_;
  std::vector<Vec3> targets_;
  bool started_ = false;
  std::size_t next_ = 0;
  Vec3 endpoint_;
  bool returning_ = false;
  std::optional<std::uint64_t> inside_since_;
  bool in_target_ = false;
  bool in_start_ = false;
  std::uint64_t now_ = 0;
  TrialRecord3D current_;
};

// Mean completion time over trials 2..N (trial 1 is practice). Throws
// TaskError when the session has fewer than `expected` trials.
double mean_completion_time(const std::vector<TrialRecord3D>& trials, int expected = 20);

}  // namespace mentum

#endif  // MENTUM_TASK_ENGINE_H_
