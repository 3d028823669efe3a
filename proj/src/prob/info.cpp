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

#include "coordsim/prob/info.hpp"

#include <cmath>
#include <set>
#include <string>

#include "coordsim/error.hpp"

namespace coordsim {
namespace {

void check_disjoint(std::initializer_list<const NameSet*> sets) {
  std::set<std::string> seen;
  for (const auto* s : sets) {
    for (const auto& name : *s) {
      if (!seen.insert(name).second) throw InvalidArgument("variable '" + name + "' appears in more than one set");
    }
  }
}

double joint_entropy(const DenseJoint& dist, const NameSet& a, const NameSet& b = {}) {
  std::vector<std::size_t> keep = dist.axis_indices(a);
  for (auto i : dist.axis_indices(b)) keep.push_back(i);
  if (keep.empty()) return 0.0;
  return entropy_bits(marginalize(dist.shape(), dist.mass(), keep));
}

}  // namespace

double clamp_information(double bits, const char* what) {
  if (bits >= kRoundingFloor) return bits;
  if (bits >= -kClampSlack) return 0.0;
  throw InternalError(std::string(what) + " evaluated to " + std::to_string(bits) + " bits");
}

InfoValue entropy(const DenseJoint& dist, const NameSet& vars, const NameSet& given) {
  if (vars.empty()) throw InvalidArgument("entropy needs at least one variable");
  check_disjoint({&vars, &given});
  const double h = joint_entropy(dist, vars, given) - joint_entropy(dist, given);
  return {clamp_information(h, "entropy"), given.empty() ? InfoKind::entropy : InfoKind::conditional_entropy};
}

InfoValue mutual_information(const DenseJoint& dist, const NameSet& a, const NameSet& b, const NameSet& given) {
  if (a.empty() || b.empty()) throw InvalidArgument("mutual information needs non-empty variable sets");
  check_disjoint({&a, &b, &given});
  NameSet ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  const double i = joint_entropy(dist, a, given) + joint_entropy(dist, b, given) - joint_entropy(dist, ab, given) -
                   joint_entropy(dist, given);
  return {clamp_information(i, "mutual information"),
          given.empty() ? InfoKind::mutual_information : InfoKind::conditional_mutual_information};
}

double total_variation(const DenseJoint& p, const DenseJoint& q) {
  if (!p.same_axes(q)) throw InvalidArgument("total variation needs identical axes and alphabets");
  double l1 = 0.0;
  auto pm = p.mass();
  auto qm = q.mass();
  for (std::size_t i = 0; i < pm.size(); ++i) l1 += std::abs(pm[i] - qm[i]);
  return std::min(1.0, 0.5 * l1);
}

double binary_entropy(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("binary entropy argument must lie in [0, 1]");
  if (eps == 0.0 || eps == 1.0) return 0.0;
  return -eps * std::log2(eps) - (1.0 - eps) * std::log2(1.0 - eps);
}

MarkovTest is_markov(const DenseJoint& dist, const NameSet& a, const NameSet& b, const NameSet& c, double tol) {
  check_disjoint({&a, &b, &c});
  const double slack = mutual_information(dist, a, c, b).bits;
  return {slack <= tol, slack};
}

}  // namespace coordsim
