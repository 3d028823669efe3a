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

#include <cstddef>
#include <string>
#include <vector>

#include "coordsim/prob/dense_joint.hpp"
#include "coordsim/rng.hpp"

namespace coordsim {

/// Input law q(x1, x2) and the channel q(y1, y2 | x1, x2) to be simulated.
/// Axis names are fixed: X1, X2, Y1, Y2. Kernel layout is [x1][x2][y1][y2].
class ChannelSpec {
 public:
  ChannelSpec(DenseJoint q_x, Alphabet y1, Alphabet y2, std::vector<double> q_y_given_x);

  const DenseJoint& q_x() const { return q_x_; }
  const Alphabet& x1() const { return q_x_.axes()[0].alphabet; }
  const Alphabet& x2() const { return q_x_.axes()[1].alphabet; }
  const Alphabet& y1() const { return y1_; }
  const Alphabet& y2() const { return y2_; }
  const std::vector<double>& kernel() const { return kernel_; }

  /// q(x) q(y|x) over (X1, X2, Y1, Y2).
  DenseJoint target() const;
  std::size_t xy_cells() const { return x1().size() * x2().size() * y1().size() * y2().size(); }
  bool deterministic() const;

 private:
  DenseJoint q_x_;
  Alphabet y1_, y2_;
  std::vector<double> kernel_;
};

/// p(var | given...), row-major over the given axes followed by var.
struct ConditionalTable {
  std::string var;
  NameSet given;
  std::vector<std::size_t> given_sizes;
  std::size_t var_size = 0;
  std::vector<double> table;

  std::size_t rows() const { return var_size == 0 ? 0 : table.size() / var_size; }
};

enum class CardinalityPreset { theorem1, epsilon_lemma };

/// Round-by-round auxiliary scheme. Round i (1-based) draws F_i from
/// p(f_i | f_1..f_{i-1}, x_owner) where the owner is X1 for odd i and X2 for
/// even i; outputs come from p(y1 | f, x1) and p(y2 | f, x2).
struct AuxScheme {
  int r = 0;
  std::vector<std::size_t> f_sizes;
  std::vector<ConditionalTable> rounds;
  ConditionalTable out1, out2;

  /// Table shapes and row sums against `channel`; throws InvalidArgument.
  void check(const ChannelSpec& channel) const;
};

std::string f_name(int i);
inline std::string owner_of_round(int i) { return i % 2 == 1 ? "X1" : "X2"; }
inline std::string other_of_round(int i) { return i % 2 == 1 ? "X2" : "X1"; }

/// Largest allowed |F_i| given the sizes of the earlier rounds.
std::size_t cardinality_bound(const ChannelSpec& channel, const std::vector<std::size_t>& earlier,
                              CardinalityPreset preset);
std::size_t cardinality_bound(std::size_t xy_cells, const std::vector<std::size_t>& earlier,
                              CardinalityPreset preset);

/// Correctly shaped scheme with all-zero tables.
AuxScheme blank_scheme(const ChannelSpec& channel, const std::vector<std::size_t>& f_sizes);

/// Every conditional row uniform.
AuxScheme uniform_scheme(const ChannelSpec& channel, const std::vector<std::size_t>& f_sizes);

/// Rows drawn from Dirichlet(alpha).
AuxScheme random_scheme(const ChannelSpec& channel, const std::vector<std::size_t>& f_sizes, Rng& rng,
                        double alpha = 1.0);

}  // namespace coordsim
