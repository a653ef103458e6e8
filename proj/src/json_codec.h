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

// JSON encoders shared by the log and live-message formats.

#ifndef MENTUM_SRC_JSON_CODEC_H_
#define MENTUM_SRC_JSON_CODEC_H_

#include "json.hpp"

#include "mentum/control_event.h"
#include "mentum/profile.h"
#include "mentum/task_engine.h"

namespace mentum {

nlohmann::json to_json(Vec2 v);
nlohmann::json to_json(Vec3 v);
Vec2 vec2(const nlohmann::json& j);
Vec3 vec3(const nlohmann::json& j);

// {"values":{key:number,...},"extra":[[key,text],...]}
nlohmann::json profile_json(const CalibrationProfile& p);
CalibrationProfile profile_from_json(const nlohmann::json& j);

nlohmann::json event_json(const ControlEvent& e);

}  // namespace mentum

#endif  // MENTUM_SRC_JSON_CODEC_H_
