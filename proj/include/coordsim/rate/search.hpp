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
#include <limits>
#include <optional>
#include <vector>

#include "coordsim/rate/region.hpp"
#include "coordsim/rate/scheme.hpp"

namespace coordsim {

struct SearchConfig {
  /// Explicit |F_i|; empty means the preset's cardinality bounds capped at max_alphabet.
  std::vector<std::size_t> f_sizes;
  std::size_t max_alphabet = 4;
  CardinalityPreset preset = CardinalityPreset::theorem1;
  bool override_cardinality = false;
  int restarts = 12;
  int iterations = 400;         // block sweeps per restart
  int polish_iterations = 20000;
  std::uint64_t seed = 1;
  int workers = 1;
  double witness_tol = 1e-6;
  std::size_t grid_points = 100000;
};

/// Alphabet sizes the search will use for r rounds; throws InvalidArgument on a bad config.
std::vector<std::size_t> search_sizes(const ChannelSpec& channel, int r, const SearchConfig& config);

struct Witness {
  AuxScheme scheme;
  RegionEval eval;
  double marginal_tv = 0.0;
  int restart = -1;
};

struct SearchOutcome {
  std::optional<Witness> witness;
  double best_violation = std::numeric_limits<double>::infinity();  // smallest worst-slack deficit seen
  int restarts_run = 0;
};

SearchOutcome search_membership(const ChannelSpec& channel, const RatePoint& point, int r,
                                const SearchConfig& config);

/// Non-negative weights on (R0, R12, R21).
struct RateObjective {
  double r0 = 0.0, r12 = 0.0, r21 = 0.0;
};

struct FixedRates {
  std::optional<double> r0, r12, r21;
};

/// Smallest objective over the region of one scheme, or +inf when a fixed
/// coordinate makes it infeasible. `point` receives the minimizer.
double scheme_min_rate(const RegionEval& eval, const RateObjective& objective, const FixedRates& fixed,
                       RatePoint* point = nullptr);

struct MinRateResult {
  double value = std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  RatePoint point;
  int restarts_run = 0;
};

MinRateResult min_rate(const ChannelSpec& channel, int r, const RateObjective& objective, const FixedRates& fixed,
                       const SearchConfig& config);

}  // namespace coordsim
