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


#include "coordsim/rate/region.hpp"

#include <algorithm>
#include <cmath>

#include "coordsim/error.hpp"
#include "coordsim/prob/info.hpp"

namespace coordsim {

namespace {

NameSet f_names(int r) {
  NameSet out;
  for (int i = 1; i <= r; ++i) out.push_back(f_name(i));
  return out;
}

NameSet with(NameSet a, const NameSet& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::size_t table_offset(const ConditionalTable& t, const std::vector<std::size_t>& given_idx, std::size_t v) {
  std::size_t row = 0;
  for (std::size_t k = 0; k < given_idx.size(); ++k) row = row * t.given_sizes[k] + given_idx[k];
  return row * t.var_size + v;
}

void require_rate(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) throw InvalidArgument(std::string(what) + " must be a non-negative number");
}

}  // namespace

RatePoint make_rate_point(double r0, double r12, double r21) {
  require_rate(r0, "R0");
  require_rate(r12, "R12");
  require_rate(r21, "R21");
  return {r0, r12, r21};
}

DenseJoint assemble_joint(const ChannelSpec& channel, const AuxScheme& scheme) {
  scheme.check(channel);
  const int r = scheme.r;
  std::vector<Axis> axes;
  for (int i = 1; i <= r; ++i) axes.push_back({f_name(i), Alphabet(scheme.f_sizes[i - 1])});
  const auto target = channel.target();
  for (const auto& a : target.axes()) axes.push_back(a);
  Shape shape;
  for (const auto& a : axes) shape.dims.push_back(a.alphabet.size());

  const std::size_t rank = axes.size();
  std::vector<double> mass(shape.cells());
  std::vector<std::size_t> idx(rank, 0), given;
  const std::size_t ix1 = r, ix2 = r + 1, iy1 = r + 2, iy2 = r + 3;
  for (std::size_t cell = 0; cell < mass.size(); ++cell) {
    double p = channel.q_x().mass()[idx[ix1] * channel.x2().size() + idx[ix2]];
    for (int i = 0; i < r && p > 0.0; ++i) {
      given.assign(idx.begin(), idx.begin() + i);
      given.push_back(i % 2 == 0 ? idx[ix1] : idx[ix2]);
      p *= scheme.rounds[i].table[table_offset(scheme.rounds[i], given, idx[i])];
    }
    if (p > 0.0) {
      given.assign(idx.begin(), idx.begin() + r);
      given.push_back(idx[ix1]);
      p *= scheme.out1.table[table_offset(scheme.out1, given, idx[iy1])];
      given.back() = idx[ix2];
      p *= scheme.out2.table[table_offset(scheme.out2, given, idx[iy2])];
    }
    mass[cell] = p;
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < shape.dims[a]) break;
      idx[a] = 0;
    }
  }
  return DenseJoint(std::move(axes), std::move(mass));
}

int rounds_of(const DenseJoint& joint) {
  for (const char* name : {"X1", "X2", "Y1", "Y2"}) {
    if (!joint.has_axis(name)) throw InvalidArgument(std::string("joint is missing axis ") + name);
  }
  int r = 0;
  while (joint.has_axis(f_name(r + 1))) ++r;
  if (r == 0) throw InvalidArgument("joint has no auxiliary axis F1");
  if (joint.rank() != static_cast<std::size_t>(r) + 4) throw InvalidArgument("joint has unexpected axes");
  return r;
}

TrReport validate_T_r(const ChannelSpec& channel, const DenseJoint& joint, const TrOptions& options) {
  TrReport rep;
  rep.r = rounds_of(joint);
  const int r = rep.r;
  const auto target = channel.target();
  const auto xy = joint.marginal({"X1", "X2", "Y1", "Y2"});
  if (!xy.same_axes(target)) throw InvalidArgument("joint alphabets do not match the channel");
  rep.marginal_tv = total_variation(xy, target);
  bool ok = rep.marginal_tv <= options.tol;

  NameSet before;
  for (int i = 1; i <= r; ++i) {
    const std::string fi = f_name(i), own = owner_of_round(i), oth = other_of_round(i);
    const double s = mutual_information(joint, {fi}, {oth}, with(before, {own})).bits;
    rep.chains.push_back({fi + " - " + (before.empty() ? "" : "F<" + std::to_string(i) + " ") + own + " - " + oth, s});
    before.push_back(fi);
  }
  const NameSet fs = f_names(r);
  rep.chains.push_back({"Y1 - F X1 - X2 Y2", mutual_information(joint, {"Y1"}, {"X2", "Y2"}, with(fs, {"X1"})).bits});
  rep.chains.push_back({"Y2 - F X2 - X1 Y1", mutual_information(joint, {"Y2"}, {"X1", "Y1"}, with(fs, {"X2"})).bits});
  for (const auto& c : rep.chains) ok = ok && c.slack <= options.tol;

  std::vector<std::size_t> earlier;
  for (int i = 1; i <= r; ++i) {
    const std::size_t k = joint.axes()[joint.axis_index(f_name(i))].alphabet.size();
    const bool fits = k <= cardinality_bound(channel, earlier, options.preset);
    rep.cardinality_ok.push_back(fits);
    if (options.enforce_cardinality) ok = ok && fits;
    earlier.push_back(k);
  }
  rep.pass = ok;
  return rep;
}

RegionEval theorem1_eval(const DenseJoint& joint) {
  const int r = rounds_of(joint);
  const NameSet fs = f_names(r);
  RegionEval e;
  const double a = mutual_information(joint, {"X1"}, fs, {"X2"}).bits;
  const double b = mutual_information(joint, {"X2"}, fs, {"X1"}).bits;
  e.i_f1_y = mutual_information(joint, {"F1"}, {"Y1", "Y2"}, {"X1", "X2"}).bits;
  e.i_f_y = mutual_information(joint, fs, {"Y1", "Y2"}, {"X1", "X2"}).bits;
  e.rhs = {a, b, a + e.i_f1_y, a + b + e.i_f_y};
  return e;
}

Membership membership(const RatePoint& p, const RegionEval& e) {
  Membership m;
  m.slack = {p.r12 - e.rhs[0], p.r21 - e.rhs[1], p.r0 + p.r12 - e.rhs[2], p.r0 + p.r12 + p.r21 - e.rhs[3]};
  m.member = std::all_of(m.slack.begin(), m.slack.end(), [](double s) { return s >= -kMembershipSlack; });
  return m;
}

Membership membership(const RatePoint& point, const DenseJoint& joint) {
  return membership(point, theorem1_eval(joint));
}

ComputationEval corollary1_eval(const ChannelSpec& channel, const DenseJoint& joint, double tol) {
  if (!channel.deterministic()) throw InvalidArgument("computation region needs a deterministic target");
  ComputationEval c;
  c.eval = theorem1_eval(joint);
  const NameSet fs = f_names(rounds_of(joint));
  c.h_y1 = entropy(joint, {"Y1"}, with(fs, {"X1"})).bits;
  c.h_y2 = entropy(joint, {"Y2"}, with(fs, {"X2"})).bits;
  c.computable = c.h_y1 <= tol && c.h_y2 <= tol;
  return c;
}

std::pair<double, double> theorem2_eval(const DenseJoint& joint) {
  const auto e = theorem1_eval(joint);
  return {e.rhs[0], e.rhs[1]};
}

double epsilon_slack(double eps, std::size_t y_cells) {
  return 2.0 * (eps * std::log2(static_cast<double>(y_cells)) + binary_entropy(eps));
}

EpsilonMembership epsilon_region_membership(const RatePoint& point, const DenseJoint& joint,
                                            const ChannelSpec& channel, double eps, double chain_tol) {
  if (!(eps > 0.0 && eps < 0.5)) throw InvalidArgument("eps must lie in (0, 1/2)");
  TrOptions opt;
  opt.tol = chain_tol;
  opt.preset = CardinalityPreset::epsilon_lemma;
  opt.enforce_cardinality = false;
  const auto rep = validate_T_r(channel, joint, opt);
  for (const auto& c : rep.chains) {
    if (c.slack > chain_tol) throw PreconditionViolation("Markov chain " + c.chain + " does not hold");
  }
  if (!(rep.marginal_tv < eps)) throw PreconditionViolation("marginal is not within eps of the target");

  EpsilonMembership out;
  const auto e = theorem1_eval(joint);
  out.exact = membership(point, e);
  out.relax = 3.0 * epsilon_slack(eps, channel.y1().size() * channel.y2().size());
  auto relaxed = e;
  relaxed.rhs[2] -= out.relax;
  relaxed.rhs[3] -= out.relax;
  out.relaxed = membership(point, relaxed);
  return out;
}

AuxScheme padding_embed(const AuxScheme& scheme) {
  AuxScheme out;
  out.r = scheme.r + 2;
  out.f_sizes = {1, 1};
  out.f_sizes.insert(out.f_sizes.end(), scheme.f_sizes.begin(), scheme.f_sizes.end());

  // The X alphabets are recovered from the first two rounds' tables.
  const std::size_t x1 = scheme.rounds[0].given_sizes.back();
  const std::size_t x2 = scheme.out2.given_sizes.back();
  ConditionalTable c1{"F1", {"X1"}, {x1}, 1, std::vector<double>(x1, 1.0)};
  ConditionalTable c2{"F2", {"F1", "X2"}, {1, x2}, 1, std::vector<double>(x2, 1.0)};
  out.rounds = {c1, c2};

  auto shift = [](const ConditionalTable& t) {
    ConditionalTable s = t;
    s.given = {"F1", "F2"};
    s.given_sizes = {1, 1};
    for (std::size_t k = 0; k < t.given.size(); ++k) {
      const auto& g = t.given[k];
      s.given.push_back(g[0] == 'F' ? f_name(std::stoi(g.substr(1)) + 2) : g);
      s.given_sizes.push_back(t.given_sizes[k]);
    }
    if (s.var[0] == 'F') s.var = f_name(std::stoi(s.var.substr(1)) + 2);
    return s;
  };
  for (const auto& t : scheme.rounds) out.rounds.push_back(shift(t));
  out.out1 = shift(scheme.out1);
  out.out2 = shift(scheme.out2);
  return out;
}

}  // namespace coordsim
