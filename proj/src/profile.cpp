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

#include "mentum/profile.h"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mentum/error.h"
#include "mentum/text.h"

namespace mentum {

namespace {

struct Field {
  std::string_view key;
  double CalibrationProfile::*member;
};

constexpr std::array<Field, 12> kFields{{
    {"tilt_pos_x", &CalibrationProfile::tilt_pos_x},
    {"tilt_neg_x", &CalibrationProfile::tilt_neg_x},
    {"tilt_pos_y", &CalibrationProfile::tilt_pos_y},
    {"tilt_neg_y", &CalibrationProfile::tilt_neg_y},
    {"stretch_press", &CalibrationProfile::stretch_press},
    {"stretch_release", &CalibrationProfile::stretch_release},
    {"stretch_press_down", &CalibrationProfile::stretch_press_down},
    {"speed_xy", &CalibrationProfile::speed_xy},
    {"speed_z", &CalibrationProfile::speed_z},
    {"filter_min_cutoff", &CalibrationProfile::filter_min_cutoff},
    {"filter_beta", &CalibrationProfile::filter_beta},
    {"debounce_ms", &CalibrationProfile::debounce_ms},
}};

const Field* find_field(std::string_view key) {
  for (const Field& f : kFields) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

}  // namespace

const std::vector<std::string_view>& profile_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> k;
    for (const Field& f : kFields) k.push_back(f.key);
    return k;
  }();
  return keys;
}

std::string validation_error(const CalibrationProfile& p) {
  for (const Field& f : kFields) {
    if (!std::isfinite(p.*f.member)) return std::string(f.key) + " is not finite";
  }
  if (!(p.tilt_neg_x < p.tilt_pos_x)) return "tilt_neg_x must be below tilt_pos_x";
  if (!(p.tilt_neg_y < p.tilt_pos_y)) return "tilt_neg_y must be below tilt_pos_y";
  if (!(p.stretch_release < p.stretch_press)) return "stretch_release must be below stretch_press";
  if (!(p.stretch_press_down < p.stretch_release)) return "stretch_press_down must be below stretch_release";
  if (!(p.speed_xy > 0.0)) return "speed_xy must be positive";
  if (!(p.speed_z > 0.0)) return "speed_z must be positive";
  if (!(p.filter_min_cutoff > 0.0)) return "filter_min_cutoff must be positive";
  if (!(p.filter_beta >= 0.0)) return "filter_beta must be non-negative";
  if (!(p.debounce_ms >= 0.0)) return "debounce_ms must be non-negative";
  return {};
}

void validate(const CalibrationProfile& profile) {
  if (std::string why = validation_error(profile); !why.empty()) throw ConfigError("invalid profile: " + why);
}

std::string save_profile(const CalibrationProfile& profile) {
  std::string out = "# mentum calibration profile\n";
  for (const Field& f : kFields) {
    out += f.key;
    out += '=';
    out += format_double(profile.*f.member);
    out += '\n';
  }
  for (const auto& [key, value] : profile.extra) out += key + "=" + value + "\n";
  return out;
}

CalibrationProfile load_profile(std::string_view text) {
  CalibrationProfile profile;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  for (std::string_view rest = text; !rest.empty();) {
    const std::size_t nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("profile line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("profile line " + std::to_string(line_no) + ": empty key");
    if (!seen.emplace(key).second) {
      throw ConfigError("profile line " + std::to_string(line_no) + ": duplicate key " + std::string(key));
    }
    if (const Field* f = find_field(key)) {
      const auto parsed = parse_double(value);
      if (!parsed) {
        throw ConfigError("profile line " + std::to_string(line_no) + ": " + std::string(key) +
                          " is not a number");
      }
      profile.*f->member = *parsed;
    } else {
      profile.extra.emplace_back(std::string(key), std::string(value));
    }
  }
  for (const Field& f : kFields) {
    if (!seen.contains(f.key)) throw ConfigError("profile is missing required key " + std::string(f.key));
  }
  validate(profile);
  return profile;
}

CalibrationProfile load_profile_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read profile " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_profile(buf.str());
}

void save_profile_file(const CalibrationProfile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write profile " + path);
  out << save_profile(profile);
  if (!out) throw IoError("failed writing profile " + path);
}

CalibrationProfile merge_update(const CalibrationProfile& base, const ProfileUpdate& update) {
  CalibrationProfile merged = base;
  for (const auto& [key, value] : update) {
    const Field* f = find_field(key);
    if (f == nullptr) throw ConfigError("unknown profile key " + key);
    merged.*f->member = value;
  }
  validate(merged);
  return merged;
}

double profile_value(const CalibrationProfile& profile, std::string_view key) {
  const Field* f = find_field(key);
  if (f == nullptr) throw ConfigError("unknown profile key " + std::string(key));
  return profile.*f->member;
}

}  // namespace mentum
