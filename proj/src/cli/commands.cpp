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


#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "coordsim/cli/cli.hpp"
#include "coordsim/error.hpp"
#include "coordsim/fme/fme.hpp"
#include "coordsim/osrb/protocol.hpp"
#include "coordsim/prob/bounds.hpp"
#include "coordsim/prob/json_io.hpp"
#include "coordsim/rate/json_io.hpp"
#include "coordsim/rate/search.hpp"

namespace coordsim::cli {
namespace {

bool verbose() {
  const char* v = std::getenv("COORDSIM_VERBOSE");
  return v != nullptr && *v != '\0' && std::string(v) != "0";
}

void note(const std::string& msg) {
  if (verbose()) std::cerr << "coordsim: " << msg << "\n";
}

ChannelSpec load_channel(const RunConfig& c) {
  if (c.channel_path.empty()) throw ParseError("--channel is required");
  return channel_from_json(read_json_file(c.channel_path));
}

AuxScheme load_scheme(const RunConfig& c, const ChannelSpec& channel) {
  if (c.scheme_path.empty()) throw ParseError("--scheme is required");
  return scheme_from_json(channel, read_json_file(c.scheme_path));
}

DenseJoint load_joint(const RunConfig& c, const ChannelSpec& channel) {
  if (!c.joint_path.empty()) return dense_joint_from_json(read_json_file(c.joint_path));
  return assemble_joint(channel, load_scheme(c, channel));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write " + path);
  f << text;
}

void emit(const RunConfig& c, std::ostream& out, const nlohmann::json& j) {
  const auto text = rounded(j).dump(2) + "\n";
  if (c.out_path.empty()) {
    out << text;
  } else {
    write_text(c.out_path, text);
  }
}

nlohmann::json protocol_rates_json(const ProtocolRates& p) {
  return {{"R0", p.r0}, {"R", p.r}, {"Rt", p.rt}};
}

nlohmann::json margins_json(const MarginReport& rep) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& k : rep.constraints) {
    list.push_back({{"name", k.name}, {"slack", k.slack}, {"strict", k.strict}, {"class", to_string(k.cls)}});
  }
  return {{"constraints", list}, {"R12", rep.r12}, {"R21", rep.r21}, {"class", to_string(rep.cls)}};
}

SearchConfig search_config(const RunConfig& c) {
  SearchConfig s;
  s.max_alphabet = c.max_alphabet;
  s.restarts = c.restarts;
  s.seed = c.seed;
  s.workers = c.workers;
  return s;
}

nlohmann::json witness_json(const std::optional<Witness>& w) {
  if (!w) return nullptr;
  return {{"scheme", to_json(w->scheme)},
          {"region", to_json(w->eval)},
          {"marginal_tv", w->marginal_tv},
          {"restart", w->restart}};
}

std::vector<std::string> round_rate_names(int r) {
  std::vector<std::string> v;
  for (int i = 1; i <= r; ++i) {
    v.push_back(rate_name(i));
    v.push_back(rate_tilde_name(i));
  }
  return v;
}

// Strict constraints on the tilde rates alone that include the first one:
// the cumulative randomness sums.
LinearSystem without_sums(const LinearSystem& s, int r) {
  LinearSystem out{s.vars, {}};
  const auto first = s.index_of(rate_tilde_name(1));
  for (const auto& q : s.ineqs) {
    bool only_tilde = q.rel == Relation::gt && q.coef[first] != 0.0;
    for (std::size_t v = 0; v < s.vars.size() && only_tilde; ++v) {
      if (q.coef[v] == 0.0) continue;
      bool tilde = false;
      for (int i = 1; i <= r; ++i) tilde = tilde || s.vars[v] == rate_tilde_name(i);
      only_tilde = tilde;
    }
    if (!only_tilde) out.ineqs.push_back(q);
  }
  return out;
}

std::string csv_row(int n, const ProtocolResult& res) {
  double err = 0.0;
  for (double e : res.sw_error_rate) err += e;
  if (!res.sw_error_rate.empty()) err /= static_cast<double>(res.sw_error_rate.size());
  return std::to_string(n) + "," + (res.mode == "exact" ? "exact" : "mc") + "," + format_number(res.tv_to_target) +
         "," + format_number(err) + "," + format_number(res.empirical.median) + "\n";
}

nlohmann::json result_json(const ProtocolResult& res) {
  return {{"n", res.n},
          {"mode", res.mode},
          {"trials", res.trials},
          {"tv_to_target", std::isnan(res.tv_to_target) ? nlohmann::json(nullptr) : nlohmann::json(res.tv_to_target)},
          {"total_mass", res.total_mass},
          {"sw_error_rate", res.sw_error_rate},
          {"k_entropy", res.k_entropy},
          {"nominal_rate", res.nominal_rate},
          {"empirical_tv",
           {{"mean", res.empirical.mean},
            {"q10", res.empirical.q10},
            {"median", res.empirical.median},
            {"q90", res.empirical.q90},
            {"max", res.empirical.max}}}};
}

// Shared body of simulate and sweep. Returns the exit code.
int run_protocol_rows(const RunConfig& c, std::ostream& out, bool with_json) {
  const auto channel = load_channel(c);
  const auto scheme = load_scheme(c, channel);
  if (!c.protocol_rates) throw ParseError("--protocol-rates is required");
  if (c.n_list.empty()) throw InvalidArgument("empty n list");
  if (c.trials < 0) throw InvalidArgument("trials must be non-negative");
  if (c.mc_only && c.trials == 0) throw InvalidArgument("--mc needs --trials > 0");
  ProtocolModel model(channel, scheme);
  SimOptions opts;
  opts.typicality.delta = c.delta;
  opts.typicality.check();
  opts.budget = c.budget;
  opts.workers = c.workers;

  std::string csv = "n,mode,tv,sw_error_mean,emp_tv_median\n";
  nlohmann::json runs = nlohmann::json::array();
  nlohmann::json summary = {{"seed", c.seed},
                            {"delta", c.delta},
                            {"protocol_rates", protocol_rates_json(*c.protocol_rates)},
                            {"margins", margins_json(rate_margin_report(model.joint(), *c.protocol_rates))}};
  int code = kExitOk;
  for (int n : c.n_list) {
    const auto bins = make_code(scheme, *c.protocol_rates, n, c.seed);
    try {
      if (!c.mc_only) {
        note("exact n=" + std::to_string(n));
        const auto res = exact_induced_pmf(model, bins, std::nullopt, InducedMode::b, opts);
        csv += csv_row(n, res);
        runs.push_back(result_json(res));
      }
      if (c.trials > 0) {
        note("monte-carlo n=" + std::to_string(n));
        const auto res = simulate_mc(model, bins, c.trials, derive_seed(c.seed, 2, static_cast<std::uint64_t>(n)), opts);
        csv += csv_row(n, res);
        runs.push_back(result_json(res));
      }
    } catch (const BudgetExceeded& e) {
      csv += "# budget exceeded at n=" + std::to_string(n) + ": " + e.what() + "\n";
      summary["budget_exceeded"] = {{"n", n}, {"message", e.what()}};
      code = kExitBudget;
      break;
    }
  }
  summary["runs"] = runs;
  if (c.out_path.empty()) {
    out << csv;
  } else {
    write_text(c.out_path, csv);
    if (with_json) write_text(c.out_path + ".json", rounded(summary).dump(2) + "\n");
  }
  return code;
}

}  // namespace

ChannelSpec induced_channel(const ChannelSpec& channel, const AuxScheme& scheme) {
  const auto xy = assemble_joint(channel, scheme).marginal({"X1", "X2", "Y1", "Y2"});
  const std::size_t ys = channel.y1().size() * channel.y2().size();
  std::vector<double> kernel(xy.mass().begin(), xy.mass().end());
  for (std::size_t row = 0; row * ys < kernel.size(); ++row) {
    double total = 0.0;
    for (std::size_t y = 0; y < ys; ++y) total += kernel[row * ys + y];
    for (std::size_t y = 0; y < ys; ++y) {
      kernel[row * ys + y] = total > 0.0 ? kernel[row * ys + y] / total : 1.0 / static_cast<double>(ys);
    }
  }
  return ChannelSpec(channel.q_x(), channel.y1(), channel.y2(), kernel);
}

ChannelSpec random_channel(Rng& rng) {
  const std::size_t xs = 2 + rng.below(2), ys = 2 + rng.below(2);
  std::vector<double> k;
  for (std::size_t x = 0; x < xs * xs; ++x) {
    auto d = rng.dirichlet(ys * ys);
    k.insert(k.end(), d.begin(), d.end());
  }
  return ChannelSpec(DenseJoint({{"X1", Alphabet(xs)}, {"X2", Alphabet(xs)}}, rng.dirichlet(xs * xs)), Alphabet(ys),
                     Alphabet(ys), k);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

nlohmann::json rounded(const nlohmann::json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) return j;
    return std::strtod(format_number(v).c_str(), nullptr);
  }
  if (j.is_array() || j.is_object()) {
    auto copy = j;
    for (auto& v : copy) v = rounded(v);
    return copy;
  }
  return j;
}

int cmd_region(const RunConfig& c, std::ostream& out) {
  const auto channel = load_channel(c);
  const auto joint = load_joint(c, channel);
  const auto rep = validate_T_r(channel, joint);
  const auto eval = theorem1_eval(joint);
  const auto [r12, r21] = theorem2_eval(joint);
  nlohmann::json j = {{"validation", to_json(rep)},
                      {"region", to_json(eval)},
                      {"empirical_region", {{"R12", r12}, {"R21", r21}}}};
  if (c.rates) j["membership"] = to_json(membership(*c.rates, eval));
  if (c.protocol_rates) j["margins"] = margins_json(rate_margin_report(joint, *c.protocol_rates));
  emit(c, out, j);
  return rep.pass ? kExitOk : kExitValidation;
}

int cmd_membership(const RunConfig& c, std::ostream& out) {
  const auto channel = load_channel(c);
  if (!c.rates) throw ParseError("--rates is required");
  nlohmann::json j = {{"rates", to_json(*c.rates)}};
  if (!c.scheme_path.empty() || !c.joint_path.empty()) {
    const auto joint = load_joint(c, channel);
    const auto rep = validate_T_r(channel, joint);
    j["validation"] = to_json(rep);
    j["membership"] = to_json(membership(*c.rates, joint));
    emit(c, out, j);
    return rep.pass ? kExitOk : kExitValidation;
  }
  const auto res = search_membership(channel, *c.rates, c.rounds, search_config(c));
  j["member"] = res.witness.has_value();
  j["witness"] = witness_json(res.witness);
  j["best_violation"] = res.best_violation;
  j["restarts_run"] = res.restarts_run;
  emit(c, out, j);
  return kExitOk;
}

int cmd_minrate(const RunConfig& c, std::ostream& out) {
  const auto channel = load_channel(c);
  if (c.objective.size() != 3) throw InvalidArgument("objective needs three weights");
  const RateObjective obj{c.objective[0], c.objective[1], c.objective[2]};
  const FixedRates fixed{c.fix_r0, c.fix_r12, c.fix_r21};
  const auto res = min_rate(channel, c.rounds, obj, fixed, search_config(c));
  nlohmann::json j = {{"value", std::isfinite(res.value) ? nlohmann::json(res.value) : nlohmann::json(nullptr)},
                      {"point", to_json(res.point)},
                      {"witness", witness_json(res.witness)},
                      {"restarts_run", res.restarts_run}};
  emit(c, out, j);
  return kExitOk;
}

int cmd_fme_verify(const RunConfig& c, std::ostream& out) {
  std::vector<DenseJoint> joints;
  if (c.random_schemes > 0) {
    if (c.rounds > 4) throw BudgetExceeded("fme-verify is limited to r <= 4");
    for (int t = 0; t < c.random_schemes; ++t) {
      Rng rng(derive_seed(c.seed, 31, static_cast<std::uint64_t>(t)));
      auto channel = random_channel(rng);
      std::vector<std::size_t> sizes;
      for (int i = 0; i < c.rounds; ++i) sizes.push_back(2 + rng.below(2));
      const auto scheme = random_scheme(channel, sizes, rng, 0.5);
      joints.push_back(assemble_joint(induced_channel(channel, scheme), scheme));
    }
  } else {
    const auto channel = load_channel(c);
    joints.push_back(load_joint(c, channel));
  }
  nlohmann::json list = nlohmann::json::array();
  bool all_equal = true;
  double worst = 0.0;
  for (std::size_t t = 0; t < joints.size(); ++t) {
    const int r = rounds_of(joints[t]);
    if (r > 4) throw BudgetExceeded("fme-verify is limited to r <= 4");
    note("fme instance " + std::to_string(t));
    auto sys = per_round_system(joints[t]);
    if (c.drop_sum_constraints) sys = without_sums(sys, r);
    const auto proj = fme_eliminate(sys, round_rate_names(r));
    const auto cmp = polyhedra_equal(proj, theorem1_system(theorem1_eval(joints[t])), c.directions, c.tol,
                                     derive_seed(c.seed, 32, t), c.workers);
    all_equal = all_equal && cmp.equal;
    worst = std::max(worst, cmp.worst_gap);
    list.push_back({{"r", r},
                    {"equal", cmp.equal},
                    {"worst_gap", cmp.worst_gap},
                    {"per_round_inequalities", sys.ineqs.size()},
                    {"projected_inequalities", proj.ineqs.size()}});
  }
  emit(c, out, {{"instances", list}, {"all_equal", all_equal}, {"worst_gap", worst}});
  return all_equal ? kExitOk : kExitValidation;
}

int cmd_simulate(const RunConfig& c, std::ostream& out) { return run_protocol_rows(c, out, true); }

int cmd_sweep(const RunConfig& c, std::ostream& out) { return run_protocol_rows(c, out, false); }

int cmd_bounds_check(const RunConfig& c, std::ostream& out) {
  const std::vector<BoundSweepReport> reps{
      sweep_entropy_gap(c.instances, derive_seed(c.seed, 61)),
      sweep_lemma4(c.instances, derive_seed(c.seed, 62), c.corrupt_eps),
      sweep_lemma5(c.instances, derive_seed(c.seed, 63), c.corrupt_eps),
  };
  nlohmann::json list = nlohmann::json::array();
  bool pass = true;
  for (const auto& r : reps) {
    pass = pass && r.violations == 0;
    list.push_back({{"name", r.name},
                    {"instances", r.instances},
                    {"violations", r.violations},
                    {"max_excess", r.max_excess},
                    {"zero_eps_instances", r.zero_eps_instances},
                    {"max_lhs_at_zero_eps", r.max_lhs_at_zero_eps}});
  }
  emit(c, out, {{"sweeps", list}, {"pass", pass}});
  return pass ? kExitOk : kExitValidation;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "region") return cmd_region(c, out);
    if (c.command == "membership") return cmd_membership(c, out);
    if (c.command == "minrate") return cmd_minrate(c, out);
    if (c.command == "fme-verify") return cmd_fme_verify(c, out);
    if (c.command == "simulate") return cmd_simulate(c, out);
    if (c.command == "sweep") return cmd_sweep(c, out);
    if (c.command == "bounds-check") return cmd_bounds_check(c, out);
    err << "unknown command: " << c.command << "\n";
    return kExitParse;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const InvalidArgument& e) {
    err << "invalid: " << e.what() << "\n";
    return kExitValidation;
  } catch (const PreconditionViolation& e) {
    err << "precondition: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace coordsim::cli
