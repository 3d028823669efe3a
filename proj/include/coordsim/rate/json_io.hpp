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

#include "coordsim/rate/region.hpp"
#include "coordsim/rate/scheme.hpp"
#include "coordsim/rate/search.hpp"

namespace coordsim {

/// {"q_x": <distribution over X1, X2>, "q_y_given_x": {"given":["X1","X2"],
///  "vars":[{"name":"Y1","symbols":[..]},{"name":"Y2","symbols":[..]}], "table":[..]}}
nlohmann::json to_json(const ChannelSpec& channel);
ChannelSpec channel_from_json(const nlohmann::json& j);

/// {"r":2, "alphabets":{"F1":2,"F2":3}, "factors":[{"var","given","table"},..]}
nlohmann::json to_json(const AuxScheme& scheme);
AuxScheme scheme_from_json(const ChannelSpec& channel, const nlohmann::json& j);

nlohmann::json to_json(const RatePoint& p);
RatePoint rate_point_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RegionEval& e);
nlohmann::json to_json(const Membership& m);
nlohmann::json to_json(const TrReport& rep);

}  // namespace coordsim
