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

// Checkers for the entropy-continuity and mutual-information bounds used by
// the converse. Each checker evaluates both sides of its inequality; callers
// decide what to do with a violation. Total variation is half the L1 norm, so
// the "eps < 1/2" hypotheses are checked literally and eps == 1/2 is rejected.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coordsim/prob/dense_joint.hpp"

namespace coordsim {

/// Numerical slack used when deciding whether lhs <= rhs.
inline constexpr double kBoundSlack = 1e-12;

struct EntropyGap {
  double tv = 0.0;
  double gap = 0.0;    // |H(p) - H(q)|
  double bound = 0.0;  // tv * log2(|X| - 1) + h_b(tv)
  bool holds = true;
};

/// |H(p) - H(q)| against tv*log2(|X|-1) + h_b(tv) for two pmfs on one axis.
EntropyGap entropy_gap_bound(const DenseJoint& p, const DenseJoint& q);

struct Lemma4Check {
  int n = 0;
  double eps = 0.0;
  double lhs = 0.0;        // sum_q I(W_q ; W^{q-1} | Z)
  double rhs = 0.0;        // 2n(eps log2|W| + h_b(eps)), the bound enforced
  double rhs_proof = 0.0;  // 2n eps log2|W| + (n+1) h_b(eps), the tighter proof form
  bool holds = true;
};

/// `w` names the n coordinates (common alphabet); `z` may be empty for no
/// conditioning. `eps` is the caller's TV certificate against some
/// conditionally independent p(z) prod_q p_q(w_q|z).
Lemma4Check lemma4_check(const DenseJoint& joint, const NameSet& w, const std::string& z, double eps);

struct Lemma5Check {
  int n = 0;
  double eps = 0.0;
  double bound = 0.0;                // 2(eps log2|Y| + h_b(eps))
  std::vector<double> per_position;  // I(X_{~q} ; Y_q | X_q)
  double time_sharing = 0.0;         // I(Y_Q ; Q | X_Q), Q uniform on [1:n]
  bool holds = true;
};

/// `x` and `y` name X_1..X_n and Y_1..Y_n. The X marginal must be i.i.d.
Lemma5Check lemma5_check(const DenseJoint& joint, const NameSet& x, const NameSet& y, double eps);

/// p(z) prod_q kernel_q(w_q | z) with p(z) taken from `joint`. Kernels are
/// row-major over (z, w); with no z each kernel is just a pmf over w.
DenseJoint conditional_product(const DenseJoint& joint, const NameSet& w, const std::string& z,
                               const std::vector<std::vector<double>>& kernels);

/// prod_q p(x_q) kernel(y_q | x_q) with p(x) the X_1 marginal of `joint`.
DenseJoint memoryless_reference(const DenseJoint& joint, const NameSet& x, const NameSet& y,
                                const std::vector<double>& kernel);

struct BoundSweepReport {
  std::string name;
  int instances = 0;
  int violations = 0;
  double max_excess = -1e300;  // max over instances of lhs - rhs
  int zero_eps_instances = 0;
  double max_lhs_at_zero_eps = 0.0;
};

/// Randomized sweeps over valid inputs. `corrupt_eps` scales the certificate
/// handed to the checker (1.0 = honest); values below 1 exercise the
/// violation path deliberately.
BoundSweepReport sweep_entropy_gap(int instances, std::uint64_t seed);
BoundSweepReport sweep_lemma4(int instances, std::uint64_t seed, double corrupt_eps = 1.0);
BoundSweepReport sweep_lemma5(int instances, std::uint64_t seed, double corrupt_eps = 1.0);

}  // namespace coordsim
