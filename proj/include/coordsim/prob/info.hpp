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

#include "coordsim/prob/dense_joint.hpp"

namespace coordsim {

enum class InfoKind { entropy, conditional_entropy, mutual_information, conditional_mutual_information };

/// An information quantity in bits. Entropies and mutual informations are
/// never negative; values in [-1e-9, 1e-14) produced by rounding become 0.
struct InfoValue {
  double bits = 0.0;
  InfoKind kind = InfoKind::entropy;

  operator double() const { return bits; }  // NOLINT(google-explicit-constructor)
};

inline constexpr double kClampSlack = 1e-9;
inline constexpr double kRoundingFloor = 1e-14;

/// H(vars | given) in bits.
InfoValue entropy(const DenseJoint& dist, const NameSet& vars, const NameSet& given = {});

/// I(a ; b | given) in bits.
InfoValue mutual_information(const DenseJoint& dist, const NameSet& a, const NameSet& b,
                             const NameSet& given = {});

/// Half the L1 distance; both arguments must have identical axes.
double total_variation(const DenseJoint& p, const DenseJoint& q);

double binary_entropy(double eps);

struct MarkovTest {
  bool holds = false;
  double slack = 0.0;  // I(a ; c | b)
};

/// Tests the chain a - b - c, i.e. I(a ; c | b) <= tol.
MarkovTest is_markov(const DenseJoint& dist, const NameSet& a, const NameSet& b, const NameSet& c,
                     double tol);

/// Maps [-kClampSlack, kRoundingFloor) to zero and rejects anything more negative.
double clamp_information(double bits, const char* what);

}  // namespace coordsim
