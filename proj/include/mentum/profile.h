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

#ifndef MENTUM_PROFILE_H_
#define MENTUM_PROFILE_H_

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mentum {

// Thresholds and speeds that define the sensor-to-control map. Tilt
// thresholds are milli-g, stretch thresholds ADC counts.
struct CalibrationProfile {
  double tilt_pos_x = 300.0;
  double tilt_neg_x = -300.0;
  double tilt_pos_y = 300.0;
  double tilt_neg_y = -300.0;
  double stretch_press = 600.0;
  double stretch_release = 450.0;
  // Arm mode only: stretch below this level drives -Z.
  double stretch_press_down = 150.0;
  double speed_xy = 500.0;  // px/s
  double speed_z = 0.1;     // m/s
  double filter_min_cutoff = 5.0;  // Hz
  double filter_beta = 0.001;
  double debounce_ms = 50.0;

  // Keys this version does not know, kept verbatim in file order.
  std::vector<std::pair<std::string, std::string>> extra;

  friend bool operator==(const CalibrationProfile&, const CalibrationProfile&) = default;
};

// Canonical key order used by save_profile.
const std::vector<std::string_view>& profile_keys();

// Throws ConfigError naming the first violated invariant.
void validate(const CalibrationProfile& profile);

// Returns the reason the profile is invalid, or an empty string.
std::string validation_error(const CalibrationProfile& profile);

// key=value lines, '#' comments.
std::string save_profile(const CalibrationProfile& profile);
CalibrationProfile load_profile(std::string_view text);

CalibrationProfile load_profile_file(const std::string& path);
void save_profile_file(const CalibrationProfile& profile, const std::string& path);

using ProfileUpdate = std::map<std::string, double>;

// Applies a partial update and validates the result. Throws ConfigError for
// unknown keys or invariant violations; the input profile is never modified.
CalibrationProfile merge_update(const CalibrationProfile& base, const ProfileUpdate& update);

double profile_value(const CalibrationProfile& profile, std::string_view key);

}  // namespace mentum

#endif  // MENTUM_PROFILE_H_
