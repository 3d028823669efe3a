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

#include "coordsim/prob/json_io.hpp"

#include <fstream>

#include "coordsim/error.hpp"

namespace coordsim {

nlohmann::json axes_to_json(const std::vector<Axis>& axes) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& a : axes) out.push_back({{"name", a.name}, {"symbols", a.alphabet.symbols()}});
  return out;
}

std::vector<Axis> axes_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("\"axes\" must be an array");
  std::vector<Axis> axes;
  for (const auto& a : j) {
    if (!a.contains("name") || !a.contains("symbols")) throw ParseError("axis needs \"name\" and \"symbols\"");
    std::vector<std::string> symbols;
    for (const auto& s : a.at("symbols")) symbols.push_back(s.is_string() ? s.get<std::string>() : s.dump());
    axes.push_back({a.at("name").get<std::string>(), Alphabet(std::move(symbols))});
  }
  return axes;
}

nlohmann::json to_json(const DenseJoint& dist) {
  return {{"axes", axes_to_json(dist.axes())},
          {"mass", std::vector<double>(dist.mass().begin(), dist.mass().end())}};
}

DenseJoint dense_joint_from_json(const nlohmann::json& j) {
  try {
    auto axes = axes_from_json(j.at("axes"));
    auto mass = j.at("mass").get<std::vector<double>>();
    return DenseJoint(std::move(axes), std::move(mass));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed distribution: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid distribution: ") + e.what());
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

}  // namespace coordsim
