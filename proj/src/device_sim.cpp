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

#include "mentum/device_sim.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

#include "mentum/error.h"

namespace mentum {

namespace {

constexpr double kAccelMin = -32768.0;
constexpr double kAccelMax = 32767.0;

bool in_accel_range(double v) { return v >= kAccelMin && v <= kAccelMax; }

std::int16_t to_accel(double v) {
  return static_cast<std::int16_t>(std::lround(std::clamp(v, kAccelMin, kAccelMax)));
}

std::uint16_t to_stretch(double v) {
  return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, static_cast<double>(kStretchMax))));
}

struct Channels {
  double ax = 0.0, ay = 0.0, az = 0.0, stretch = 0.0;
  bool button = false;
};

// Evaluates the script at absolute time t (ms); segment i covers
// (start_i, start_i + duration_i].
class ScriptCursor {
 public:
  explicit ScriptCursor(const GestureScript& script) : script_(script) {}

  Channels at(double t_ms) {
    const auto& segs = script_.segments;
    while (index_ + 1 < segs.size() && t_ms > segment_start_ + segs[index_].duration_ms) {
      previous_ = end_values(segs[index_]);
      segment_start_ += segs[index_].duration_ms;
      ++index_;
    }
    const GestureSegment& s = segs[index_];
    Channels c;
    c.button = s.button;
    if (s.interpolation == Interpolation::kHold) {
      c = end_values(s);
    } else {
      const double u = std::clamp((t_ms - segment_start_) / s.duration_ms, 0.0, 1.0);
      c.ax = previous_.ax + u * (s.ax - previous_.ax);
      c.ay = previous_.ay + u * (s.ay - previous_.ay);
      c.az = previous_.az + u * (s.az - previous_.az);
      c.stretch = previous_.stretch + u * (s.stretch - previous_.stretch);
    }
    return c;
  }

 private:
  static Channels end_values(const GestureSegment& s) { return {s.ax, s.ay, s.az, s.stretch, s.button}; }

  const GestureScript& script_;
  std::size_t index_ = 0;
  double segment_start_ = 0.0;
  Channels previous_;
};

}  // namespace

double GestureScript::total_duration_ms() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration_ms;
  return total;
}

void validate(const GestureScript& script) {
  if (script.segments.empty()) throw ConfigError("gesture script has no segments");
  for (std::size_t i = 0; i < script.segments.size(); ++i) {
    const auto& s = script.segments[i];
    const std::string where = "segment " + std::to_string(i) + ": ";
    if (!(s.duration_ms > 0.0) || !std::isfinite(s.duration_ms)) throw ConfigError(where + "duration must be positive");
    if (!in_accel_range(s.ax) || !in_accel_range(s.ay) || !in_accel_range(s.az)) {
      throw ConfigError(where + "tilt target outside accelerometer range");
    }
    if (!(s.stretch >= 0.0 && s.stretch <= kStretchMax)) throw ConfigError(where + "stretch outside 0..1023");
  }
}

void validate(const NoiseModel& noise) {
  for (double sigma : {noise.sigma_ax, noise.sigma_ay, noise.sigma_az, noise.sigma_stretch}) {
    if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be non-negative");
  }
  if (!(noise.dropout_probability >= 0.0 && noise.dropout_probability < 1.0)) {
    throw ConfigError("dropout probability must be in [0, 1)");
  }
  if (!(noise.tremor_amplitude >= 0.0) || !(noise.tremor_frequency_hz >= 0.0)) {
    throw ConfigError("tremor amplitude and frequency must be non-negative");
  }
}

std::vector<SensorFrame> synthesize(const GestureScript& script, const NoiseModel& noise, double rate_hz) {
  if (!(rate_hz >= kMinStreamRateHz && rate_hz <= kMaxStreamRateHz)) {
    throw ConfigError("stream rate must be within 10..1000 Hz");
  }
  validate(script);
  validate(noise);

  const double period_ms = 1000.0 / rate_hz;
  const auto count = static_cast<std::size_t>(std::floor(script.total_duration_ms() / period_ms + 1e-9));

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ScriptCursor cursor(script);
  std::vector<SensorFrame> frames;
  frames.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k + 1) * period_ms;
    Channels c = cursor.at(t);

    // Draw every random number unconditionally so the stream for a given
    // seed does not depend on which noise terms are enabled.
    const double n_ax = gauss(rng), n_ay = gauss(rng), n_az = gauss(rng), n_st = gauss(rng);
    const bool dropped = unit(rng) < noise.dropout_probability;

    const double tremor = noise.tremor_amplitude *
                          std::sin(2.0 * std::numbers::pi * noise.tremor_frequency_hz * t / 1000.0);
    c.ax += noise.sigma_ax * n_ax + tremor;
    c.ay += noise.sigma_ay * n_ay + tremor;
    c.az += noise.sigma_az * n_az;
    c.stretch += noise.sigma_stretch * n_st;

    if (dropped) continue;
    SensorFrame f;
    f.seq = static_cast<std::uint16_t>(k & 0xFFFF);
    f.t_ms = static_cast<std::uint64_t>(std::llround(t));
    f.ax = to_accel(c.ax);
    f.ay = to_accel(c.ay);
    f.az = to_accel(c.az);
    f.stretch = to_stretch(c.stretch);
    f.button = c.button;
    frames.push_back(f);
  }
  return frames;
}

WireStream stream_over_wire(const std::vector<SensorFrame>& frames, double corruption_rate, std::uint64_t seed) {
  WireStream out;
  out.bytes.reserve(frames.size() * kWireFrameSize);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> offset(0, kWireFrameSize - 1);
  std::uniform_int_distribution<int> mask(1, 255);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    WireFrame wire = encode_frame(frames[i]);
    if (corruption_rate > 0.0 && unit(rng) < corruption_rate) {
      wire[offset(rng)] ^= static_cast<std::uint8_t>(mask(rng));
      out.corrupted.push_back(i);
    }
    out.bytes.insert(out.bytes.end(), wire.begin(), wire.end());
  }
  return out;
}

GestureScript parse_script(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("gesture script is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ConfigError("gesture script must be a JSON array of segments");
  GestureScript script;
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("duration_ms")) {
      throw ConfigError("each segment needs an object with duration_ms");
    }
    try {
      GestureSegment s;
      s.duration_ms = item.at("duration_ms").get<double>();
      s.ax = item.value("ax", 0.0);
      s.ay = item.value("ay", 0.0);
      s.az = item.value("az", 0.0);
      s.stretch = item.value("stretch", 0.0);
      s.button = item.value("button", false);
      const std::string interp = item.value("interpolation", std::string("hold"));
      if (interp == "hold") {
        s.interpolation = Interpolation::kHold;
      } else if (interp == "linear-ramp") {
        s.interpolation = Interpolation::kLinearRamp;
      } else {
        throw ConfigError("unknown interpolation '" + interp + "'");
      }
      script.segments.push_back(s);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad segment field: ") + e.what());
    }
  }
  validate(script);
  return script;
}

std::string script_to_json(const GestureScript& script) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& s : script.segments) {
    doc.push_back({{"duration_ms", s.duration_ms},
                   {"ax", s.ax},
                   {"ay", s.ay},
                   {"az", s.az},
                   {"stretch", s.stretch},
                   {"button", s.button},
                   {"interpolation", s.interpolation == Interpolation::kHold ? "hold" : "linear-ramp"}});
  }
  return doc.dump(2);
}

GestureScript load_script_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read gesture script " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_script(buf.str());
}

}  // namespace mentum
