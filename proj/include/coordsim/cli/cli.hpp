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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coordsim/osrb/code.hpp"
#include "coordsim/rate/region.hpp"
#include "coordsim/rate/scheme.hpp"
#include "coordsim/rng.hpp"

namespace coordsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitParse = 4;
inline constexpr int kExitInternal = 1;

struct RunConfig {
  std::string command;
  std::string channel_path;
  std::string scheme_path;
  std::string joint_path;  // region: full joint over (F.., X1, X2, Y1, Y2) instead of a scheme
  std::string out_path;
  std::uint64_t seed = 0;
  int workers = 1;

  std::optional<RatePoint> rates;
  std::optional<ProtocolRates> protocol_rates;

  // simulate / sweep
  std::vector<int> n_list{4, 8, 12};
  int trials = 0;
  double delta = 0.05;
  bool mc_only = false;
  double budget = 1e8;

  // membership / minrate
  int rounds = 1;
  std::size_t max_alphabet = 4;
  int restarts = 12;
  std::vector<double> objective{0, 1, 0};
  std::optional<double> fix_r0, fix_r12, fix_r21;

  // fme-verify
  int random_schemes = 0;
  int directions = 100;
  double tol = 1e-6;
  bool drop_sum_constraints = false;

  // bounds-check
  int instances = 1000;
  double corrupt_eps = 1.0;
};

/// Keys mirror the long flag names with dashes as underscores.
void apply_config_json(const nlohmann::json& j, RunConfig& config);

/// "R0,R12,R21".
RatePoint parse_rate_point(const std::string& text);
/// "R0;R1,..,Rr;Rt1,..,Rtr".
ProtocolRates parse_protocol_rates(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

/// Same input law, with q(y|x) replaced by the law the scheme induces, so
/// the pair always validates.
ChannelSpec induced_channel(const ChannelSpec& channel, const AuxScheme& scheme);

/// Binary or ternary inputs and outputs, Dirichlet tables.
ChannelSpec random_channel(Rng& rng);

/// 12 significant digits.
std::string format_number(double v);
/// Same rounding applied to every float in the tree.
nlohmann::json rounded(const nlohmann::json& j);

int cmd_region(const RunConfig& config, std::ostream& out);
int cmd_membership(const RunConfig& config, std::ostream& out);
int cmd_minrate(const RunConfig& config, std::ostream& out);
int cmd_fme_verify(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_bounds_check(const RunConfig& config, std::ostream& out);

/// Dispatches on config.command and maps library errors to exit codes.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line, argv[0] included.
int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coordsim::cli
