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

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "coordsim/prob/dense_joint.hpp"
#include "coordsim/rate/scheme.hpp"

namespace coordsim {

/// Stand-in for unlimited common randomness.
inline constexpr double kUnlimitedRate = 1e6;
inline constexpr double kMembershipSlack = 1e-9;

struct RatePoint {
  double r0 = 0.0;
  double r12 = 0.0;
  double r21 = 0.0;
};

RatePoint make_rate_point(double r0, double r12, double r21);

/// Right-hand sides of the four region inequalities
///   R12 >= rhs[0], R21 >= rhs[1], R0 + R12 >= rhs[2], R0 + R12 + R21 >= rhs[3].
struct RegionEval {
  std::array<double, 4> rhs{};
  double i_f1_y = 0.0;  // I(F1; Y1 Y2 | X1 X2)
  double i_f_y = 0.0;   // I(F; Y1 Y2 | X1 X2)
};

struct Membership {
  bool member = false;
  std::array<double, 4> slack{};  // left side minus right side
};

/// Full joint over (F1..Fr, X1, X2, Y1, Y2).
DenseJoint assemble_joint(const ChannelSpec& channel, const AuxScheme& scheme);

struct ChainSlack {
  std::string chain;
  double slack = 0.0;
};

struct TrReport {
  int r = 0;
  double marginal_tv = 0.0;
  std::vector<ChainSlack> chains;
  std::vector<bool> cardinality_ok;
  bool pass = false;
};

struct TrOptions {
  double tol = 1e-9;
  CardinalityPreset preset = CardinalityPreset::theorem1;
  bool enforce_cardinality = true;
};

TrReport validate_T_r(const ChannelSpec& channel, const DenseJoint& joint, const TrOptions& options = {});

/// Round count of a joint carrying F1..Fr plus the four channel axes.
int rounds_of(const DenseJoint& joint);

RegionEval theorem1_eval(const DenseJoint& joint);
Membership membership(const RatePoint& point, const RegionEval& eval);
Membership membership(const RatePoint& point, const DenseJoint& joint);

struct ComputationEval {
  RegionEval eval;
  double h_y1 = 0.0;  // H(Y1 | F, X1)
  double h_y2 = 0.0;  // H(Y2 | F, X2)
  bool computable = false;
};

/// Deterministic targets only. Rate bounds with R0 = 0 are eval.rhs[0] and eval.rhs[1].
ComputationEval corollary1_eval(const ChannelSpec& channel, const DenseJoint& joint, double tol = 1e-9);

std::pair<double, double> theorem2_eval(const DenseJoint& joint);

/// 2 (eps log|Y1 x Y2| + h(eps)).
double epsilon_slack(double eps, std::size_t y_cells);

struct EpsilonMembership {
  Membership exact;
  Membership relaxed;
  double relax = 0.0;  // 3 g(eps)
};

EpsilonMembership epsilon_region_membership(const RatePoint& point, const DenseJoint& joint,
                                            const ChannelSpec& channel, double eps, double chain_tol = 1e-9);

/// Two constant rounds in front; F_i moves to F_{i+2}.
AuxScheme padding_embed(const AuxScheme& scheme);

}  // namespace coordsim
