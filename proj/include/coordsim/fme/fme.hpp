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
#include <string>
#include <vector>

#include <json.hpp>

#include "coordsim/prob/dense_joint.hpp"
#include "coordsim/rate/region.hpp"

namespace coordsim {

enum class Relation { ge, gt };

/// coef . vars (>= or >) rhs
struct Inequality {
  std::vector<double> coef;
  Relation rel = Relation::ge;
  double rhs = 0.0;
};

struct LinearSystem {
  std::vector<std::string> vars;
  std::vector<Inequality> ineqs;

  std::size_t index_of(const std::string& name) const;
  void add(const std::vector<std::pair<std::string, double>>& terms, Relation rel, double rhs);
  /// Shapes and finiteness; throws InvalidArgument.
  void check() const;
  /// Every inequality holds at x (strict ones as closures) within tol.
  bool satisfied(const std::vector<double>& x, double tol) const;
};

/// Rate variable names used by the round-by-round system.
std::string rate_name(int i);        // R1, R2, ...
std::string rate_tilde_name(int i);  // Rt1, Rt2, ...

/// Binning constraints of the r-round protocol over
/// (R0, R12, R21, R1..Rr, Rt1..Rtr), entropies taken from `joint`.
LinearSystem per_round_system(const DenseJoint& joint);

/// The four region inequalities plus non-negativity over (R0, R12, R21).
LinearSystem theorem1_system(const RegionEval& eval);

struct FmeOptions {
  bool exact = false;  // rational arithmetic with constants rounded to 12 digits
  double tol = 1e-9;
  bool prune_lp = true;
};

/// Projects out `vars` one at a time, pruning after each step.
LinearSystem fme_eliminate(const LinearSystem& system, const std::vector<std::string>& vars,
                           const FmeOptions& options = {});

/// Drops duplicate, dominated and LP-implied inequalities.
LinearSystem prune(const LinearSystem& system, const FmeOptions& options = {});

struct SupportProbe {
  std::vector<double> direction;
  double a = 0.0;  // min over the first system (inf when empty)
  double b = 0.0;
};

struct PolyCompare {
  bool equal = false;
  bool a_empty = false;
  bool b_empty = false;
  double worst_gap = 0.0;
  std::vector<SupportProbe> probes;
};

/// Compares min c.x over each system intersected with x >= 0, for every axis
/// direction plus `directions` random non-negative unit directions.
PolyCompare polyhedra_equal(const LinearSystem& a, const LinearSystem& b, int directions, double tol,
                            std::uint64_t seed, int workers = 1);

/// min c.x over the system and x >= 0; +inf when empty.
double support_value(const LinearSystem& system, const std::vector<double>& c);

nlohmann::json to_json(const LinearSystem& system);
LinearSystem linear_system_from_json(const nlohmann::json& j);

}  // namespace coordsim
