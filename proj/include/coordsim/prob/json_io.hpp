// Copyright 2026 The coordsim Authors.
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

#pragma once

#include <json.hpp>

#include "coordsim/prob/dense_joint.hpp"

namespace coordsim {

/// {"axes":[{"name":..,"symbols":[..]}..],"mass":[row-major]}. Doubles are
/// written in shortest round-trip form, so parse(dump(x)) reproduces x bit for bit.
nlohmann::json to_json(const DenseJoint& dist);
DenseJoint dense_joint_from_json(const nlohmann::json& j);

nlohmann::json axes_to_json(const std::vector<Axis>& axes);
std::vector<Axis> axes_from_json(const nlohmann::json& j);

/// Reads a whole JSON file; throws ParseError with the path on failure.
nlohmann::json read_json_file(const std::string& path);

}  // namespace coordsim
