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

#include "mentum/task_engine.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "mentum/error.h"

namespace mentum {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double distance(Vec3 a, Vec3 b) { return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z)); }

std::vector<TargetSpec2D> generate_target_set_2d() {
  std::vector<TargetSpec2D> targets;
  for (int angle : kTargetAngles) {
    for (double width : kTargetWidths) {
      for (double d : kTargetDistances) targets.push_back({angle, width, d, false});
    }
  }
  for (double width : kTargetWidths) targets.push_back({0, width, 0.0, true});
  return targets;
}

Vec2 target_center(const TargetSpec2D& target, Vec2 screen_center) {
  if (target.is_center) return screen_center;
  const double theta = target.angle_deg * std::numbers::pi / 180.0;
  return {screen_center.x + target.distance * std::cos(theta), screen_center.y + target.distance * std::sin(theta)};
}

bool inside_disk(Vec2 point, Vec2 center, double width) { return distance(point, center) < width / 2.0; }

PointingTask::PointingTask(const PointingConfig& config) : config_(config) {
  if (config.runs <= 0 || config.trials_per_run <= 0 || config.trials_per_run % 2 != 0) {
    throw ConfigError("pointing task needs a positive run count and an even number of trials per run");
  }
  std::vector<TargetSpec2D> peripheral = generate_target_set_2d();
  peripheral.erase(std::remove_if(peripheral.begin(), peripheral.end(), [](const auto& t) { return t.is_center; }),
                   peripheral.end());
  const auto reaches = static_cast<std::size_t>(config.trials_per_run / 2);
  if (reaches > peripheral.size()) throw ConfigError("more outbound reaches per run than peripheral targets");

  std::mt19937_64 rng(config.seed);
  for (int run = 0; run < config.runs; ++run) {
    std::vector<TargetSpec2D> deck = peripheral;
    std::shuffle(deck.begin(), deck.end(), rng);
    for (std::size_t i = 0; i < reaches; ++i) {
      schedule_.push_back(deck[i]);
      schedule_.push_back({0, deck[i].width, deck[i].distance, true});
    }
  }
}

int PointingTask::run() const {
  return std::min(static_cast<int>(next_) / config_.trials_per_run, config_.runs - 1);
}

const TargetSpec2D& PointingTask::active_target() const {
  return schedule_[std::min(next_, schedule_.size() - 1)];
}

Vec2 PointingTask::active_target_pos() const { return target_center(active_target(), config_.screen.center()); }

void PointingTask::start(std::uint64_t t_ms) {
  started_ = true;
  next_ = 0;
  pointer_ = config_.screen.center();
  halted_ = false;
  onset_t_ = t_ms;
  start_pos_ = pointer_;
  misclicks_.clear();
  path_ = {{t_ms, pointer_}};
}

std::optional<TrialRecord2D> PointingTask::step(const ControlEvent& event) {
  if (!started_) throw TaskError("pointing event before session start");
  if (finished()) return std::nullopt;

  switch (event.kind) {
    case EventKind::kPointerDelta:
      if (!halted_) {
        pointer_.x = std::clamp(pointer_.x + event.dx, 0.0, config_.screen.width);
        pointer_.y = std::clamp(pointer_.y + event.dy, 0.0, config_.screen.height);
        path_.push_back({event.t_ms, pointer_});
      }
      break;
    case EventKind::kClickPress: {
      if (!inside_disk(pointer_, active_target_pos(), active_target().width)) {
        misclicks_.push_back({pointer_, event.t_ms});
        halted_ = true;
        break;
      }
      TrialRecord2D record;
      record.index = static_cast<int>(next_);
      record.run = run();
      record.target = active_target();
      record.target_pos = active_target_pos();
      record.start_pos = start_pos_;
      record.end_pos = pointer_;
      record.onset_t = onset_t_;
      record.success_click_t = event.t_ms;
      record.misclicks = std::move(misclicks_);
      record.path = std::move(path_);

      ++next_;
      onset_t_ = event.t_ms;
      start_pos_ = pointer_;
      misclicks_.clear();
      path_ = {{event.t_ms, pointer_}};
      return record;
    }
    case EventKind::kClickRelease:
      halted_ = false;
      break;
    case EventKind::kZDelta:
    case EventKind::kModeToggle:
      break;
  }
  return std::nullopt;
}

std::vector<Vec3> arm_target_layout() {
  constexpr double kRing = 0.3;
  const double polar = std::sqrt(kRing * kRing + 0.15 * 0.15);
  std::vector<Vec3> targets;
  for (double z : {0.35, 0.65}) {
    for (int k = 0; k < 8; ++k) {
      const double a = k * std::numbers::pi / 4.0;
      targets.push_back({0.5 + kRing * std::cos(a), 0.5 + kRing * std::sin(a), z});
    }
  }
  targets.push_back({0.5, 0.5, 0.5 - polar});
  targets.push_back({0.5, 0.5, 0.5 + polar});
  return targets;
}

ArmTask::ArmTask(const ArmConfig& config) : config_(config) {
  if (config.trials <= 0) throw ConfigError("arm task needs at least one trial");
  if (!(config.gain_m_per_px > 0.0)) throw ConfigError("arm gain must be positive");
  const std::vector<Vec3> layout = arm_target_layout();
  std::mt19937_64 rng(config.seed);
  std::vector<Vec3> deck;
  while (targets_.size() < static_cast<std::size_t>(config.trials)) {
    if (deck.empty()) {
      deck = layout;
      std::shuffle(deck.begin(), deck.end(), rng);
    }
    targets_.push_back(deck.back());
    deck.pop_back();
  }
}

Vec3 ArmTask::current_target() const { return targets_[std::min(next_, targets_.size() - 1)]; }

Vec3 ArmTask::active_sphere_center() const { return returning_ ? config_.start : current_target(); }

double ArmTask::dwell_progress(std::uint64_t t_ms) const {
  if (!inside_since_ || t_ms < *inside_since_) return 0.0;
  return std::min(1.0, static_cast<double>(t_ms - *inside_since_) / static_cast<double>(kDwellMs));
}

void ArmTask::start(std::uint64_t t_ms) {
  started_ = true;
  next_ = 0;
  endpoint_ = config_.start;
  returning_ = false;
  inside_since_.reset();
  now_ = t_ms;
  current_ = TrialRecord3D{};
  current_.index = 0;
  current_.practice = true;
  current_.target = current_target();
  current_.onset_t = t_ms;
  in_target_ = distance(endpoint_, current_.target) < kSphereRadius;
  in_start_ = true;
  if (in_target_) inside_since_ = t_ms;
}

void ArmTask::update_containment(std::uint64_t t_ms) {
  const bool in_target = distance(endpoint_, current_target()) < kSphereRadius;
  const bool in_start = distance(endpoint_, config_.start) < kSphereRadius;
  if (in_target != in_target_) current_.crossings.push_back({t_ms, Sphere::kTarget, in_target});
  if (in_start != in_start_) current_.crossings.push_back({t_ms, Sphere::kStart, in_start});
  in_target_ = in_target;
  in_start_ = in_start;

  const bool inside_active = returning_ ? in_start_ : in_target_;
  if (!inside_active) {
    inside_since_.reset();
  } else if (!inside_since_) {
    inside_since_ = t_ms;
  }
}

std::optional<TrialRecord3D> ArmTask::settle(std::uint64_t t_ms) {
  while (!finished() && inside_since_ && t_ms >= *inside_since_ + kDwellMs) {
    const std::uint64_t done = *inside_since_ + kDwellMs;
    if (!returning_) {
      current_.outbound_dwell_t = done;
      returning_ = true;
      inside_since_.reset();
      if (in_start_) inside_since_ = done;
      continue;
    }
    current_.return_dwell_t = done;
    TrialRecord3D record = std::move(current_);
    ++next_;
    returning_ = false;
    inside_since_.reset();
    if (!finished()) {
      current_ = TrialRecord3D{};
      current_.index = static_cast<int>(next_);
      current_.target = current_target();
      current_.onset_t = done;
      in_target_ = distance(endpoint_, current_.target) < kSphereRadius;
      if (in_target_) inside_since_ = done;
    }
    return record;
  }
  return std::nullopt;
}

std::optional<TrialRecord3D> ArmTask::advance(std::uint64_t t_ms) {
  if (!started_) throw TaskError("arm clock advanced before session start");
  std::optional<TrialRecord3D> record = settle(t_ms);
  now_ = std::max(now_, t_ms);
  return record;
}

std::optional<TrialRecord3D> ArmTask::step(const ControlEvent& event) {
  if (!started_) throw TaskError("arm event before session start");
  std::optional<TrialRecord3D> record = settle(event.t_ms);
  now_ = std::max(now_, event.t_ms);
  if (finished()) return record;

  if (event.kind == EventKind::kPointerDelta) {
    endpoint_.x = std::clamp(endpoint_.x + event.dx * config_.gain_m_per_px, 0.0, 1.0);
    endpoint_.y = std::clamp(endpoint_.y + event.dy * config_.gain_m_per_px, 0.0, 1.0);
  } else if (event.kind == EventKind::kZDelta) {
    endpoint_.z = std::clamp(endpoint_.z + event.dz, 0.0, 1.0);
  } else {
    return record;
  }
  update_containment(event.t_ms);
  return record;
}

double mean_completion_time(const std::vector<TrialRecord3D>& trials, int expected) {
  if (static_cast<int>(trials.size()) < expected || trials.size() < 2) {
    throw TaskError("arm session incomplete: " + std::to_string(trials.size()) + " of " +
                    std::to_string(expected) + " trials");
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < trials.size(); ++i) sum += trials[i].completion_time_s();
  return sum / static_cast<double>(trials.size() - 1);
}

}  // namespace mentum
