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


#include "coordsim/rate/json_io.hpp"

#include "coordsim/error.hpp"
#include "coordsim/prob/json_io.hpp"

namespace coordsim {

namespace {

template <class F>
auto parsing(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed ") + what + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid ") + what + ": " + e.what());
  }
}

nlohmann::json table_json(const ConditionalTable& t) {
  return {{"var", t.var}, {"given", t.given}, {"table", t.table}};
}

}  // namespace

nlohmann::json to_json(const ChannelSpec& channel) {
  return {{"q_x", to_json(channel.q_x())},
          {"q_y_given_x",
           {{"given", {"X1", "X2"}},
            {"vars", axes_to_json({{"Y1", channel.y1()}, {"Y2", channel.y2()}})},
            {"table", channel.kernel()}}}};
}

ChannelSpec channel_from_json(const nlohmann::json& j) {
  return parsing("channel", [&] {
    auto qx = dense_joint_from_json(j.at("q_x"));
    const auto& k = j.at("q_y_given_x");
    if (k.contains("given") && k.at("given") != nlohmann::json({"X1", "X2"})) {
      throw ParseError("q_y_given_x must be given [\"X1\",\"X2\"]");
    }
    auto vars = axes_from_json(k.at("vars"));
    if (vars.size() != 2 || vars[0].name != "Y1" || vars[1].name != "Y2") {
      throw ParseError("q_y_given_x vars must be Y1 then Y2");
    }
    return ChannelSpec(std::move(qx), vars[0].alphabet, vars[1].alphabet, k.at("table").get<std::vector<double>>());
  });
}

nlohmann::json to_json(const AuxScheme& scheme) {
  nlohmann::json alph = nlohmann::json::object();
  for (int i = 1; i <= scheme.r; ++i) alph[f_name(i)] = scheme.f_sizes[i - 1];
  nlohmann::json factors = nlohmann::json::array();
  for (const auto& t : scheme.rounds) factors.push_back(table_json(t));
  factors.push_back(table_json(scheme.out1));
  factors.push_back(table_json(scheme.out2));
  return {{"r", scheme.r}, {"alphabets", alph}, {"factors", factors}};
}

AuxScheme scheme_from_json(const ChannelSpec& channel, const nlohmann::json& j) {
  return parsing("scheme", [&] {
    const int r = j.at("r").get<int>();
    if (r < 1) throw ParseError("scheme needs r >= 1");
    std::vector<std::size_t> sizes;
    for (int i = 1; i <= r; ++i) sizes.push_back(j.at("alphabets").at(f_name(i)).get<std::size_t>());
    auto s = blank_scheme(channel, sizes);
    std::vector<ConditionalTable*> slots;
    for (auto& t : s.rounds) slots.push_back(&t);
    slots.push_back(&s.out1);
    slots.push_back(&s.out2);
    std::vector<bool> seen(slots.size(), false);
    for (const auto& f : j.at("factors")) {
      const auto var = f.at("var").get<std::string>();
      std::size_t k = 0;
      while (k < slots.size() && slots[k]->var != var) ++k;
      if (k == slots.size()) throw ParseError("unexpected factor for " + var);
      if (seen[k]) throw ParseError("duplicate factor for " + var);
      if (f.at("given").get<NameSet>() != slots[k]->given) throw ParseError("factor for " + var + " has the wrong given list");
      auto table = f.at("table").get<std::vector<double>>();
      if (table.size() != slots[k]->table.size()) throw ParseError("factor for " + var + " has the wrong size");
      slots[k]->table = std::move(table);
      seen[k] = true;
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (!seen[k]) throw ParseError("missing factor for " + slots[k]->var);
    }
    s.check(channel);
    return s;
  });
}

nlohmann::json to_json(const RatePoint& p) { return {{"R0", p.r0}, {"R12", p.r12}, {"R21", p.r21}}; }

RatePoint rate_point_from_json(const nlohmann::json& j) {
  return parsing("rate point", [&] {
    return make_rate_point(j.at("R0").get<double>(), j.at("R12").get<double>(), j.at("R21").get<double>());
  });
}

nlohmann::json to_json(const RegionEval& e) {
  return {{"rhs", e.rhs}, {"I_F1_Y_given_X", e.i_f1_y}, {"I_F_Y_given_X", e.i_f_y}};
}

nlohmann::json to_json(const Membership& m) { return {{"member", m.member}, {"slack", m.slack}}; }

nlohmann::json to_json(const TrReport& rep) {
  nlohmann::json chains = nlohmann::json::array();
  for (const auto& c : rep.chains) chains.push_back({{"chain", c.chain}, {"slack", c.slack}});
  return {{"r", rep.r},
          {"marginal_tv", rep.marginal_tv},
          {"chains", chains},
          {"cardinality_ok", rep.cardinality_ok},
          {"pass", rep.pass}};
}

}  // namespace coordsim
