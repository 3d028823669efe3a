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


#include <CLI11.hpp>

#include <charconv>
#include <sstream>

#include "coordsim/cli/cli.hpp"
#include "coordsim/error.hpp"
#include "coordsim/prob/json_io.hpp"

namespace coordsim::cli {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'");
  }
  while (used < s.size() && s[used] == ' ') ++used;
  if (used != s.size()) throw ParseError("not a number: '" + s + "'");
  return v;
}

std::vector<double> doubles(const std::string& text) {
  std::vector<double> v;
  if (text.empty()) return v;
  for (const auto& p : split(text, ',')) v.push_back(to_double(p));
  return v;
}

template <class T>
void take(const nlohmann::json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace

RatePoint parse_rate_point(const std::string& text) {
  const auto v = doubles(text);
  if (v.size() != 3) throw ParseError("rates need three values R0,R12,R21");
  try {
    return make_rate_point(v[0], v[1], v[2]);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

ProtocolRates parse_protocol_rates(const std::string& text) {
  const auto parts = split(text, ';');
  if (parts.size() != 3) throw ParseError("protocol rates look like R0;R1,..;Rt1,..");
  try {
    return make_protocol_rates(to_double(parts[0]), doubles(parts[1]), doubles(parts[2]));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what());
  }
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> v;
  for (const auto& p : split(text, ',')) {
    int x = 0;
    const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), x);
    if (ec != std::errc() || ptr != p.data() + p.size()) throw ParseError("not an integer: '" + p + "'");
    v.push_back(x);
  }
  return v;
}

void apply_config_json(const nlohmann::json& j, RunConfig& c) {
  try {
    take(j, "command", c.command);
    take(j, "channel", c.channel_path);
    take(j, "scheme", c.scheme_path);
    take(j, "joint", c.joint_path);
    take(j, "out", c.out_path);
    take(j, "seed", c.seed);
    take(j, "workers", c.workers);
    if (j.contains("rates")) {
      const auto v = j.at("rates").get<std::vector<double>>();
      if (v.size() != 3) throw ParseError("rates need three values");
      c.rates = make_rate_point(v[0], v[1], v[2]);
    }
    if (j.contains("protocol_rates")) {
      const auto& p = j.at("protocol_rates");
      c.protocol_rates = make_protocol_rates(p.at("R0").get<double>(), p.at("R").get<std::vector<double>>(),
                                             p.at("Rt").get<std::vector<double>>());
    }
    take(j, "n", c.n_list);
    take(j, "trials", c.trials);
    take(j, "delta", c.delta);
    if (j.contains("mode")) {
      const auto m = j.at("mode").get<std::string>();
      if (m != "exact" && m != "mc") throw ParseError("mode must be exact or mc");
      c.mc_only = m == "mc";
    }
    take(j, "budget", c.budget);
    take(j, "r", c.rounds);
    take(j, "max_alphabet", c.max_alphabet);
    take(j, "restarts", c.restarts);
    take(j, "objective", c.objective);
    if (j.contains("fix_r0")) c.fix_r0 = j.at("fix_r0").get<double>();
    if (j.contains("fix_r12")) c.fix_r12 = j.at("fix_r12").get<double>();
    if (j.contains("fix_r21")) c.fix_r21 = j.at("fix_r21").get<double>();
    take(j, "random_schemes", c.random_schemes);
    take(j, "directions", c.directions);
    take(j, "tol", c.tol);
    take(j, "drop_sum_constraints", c.drop_sum_constraints);
    take(j, "instances", c.instances);
    take(j, "corrupt_eps", c.corrupt_eps);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coordination rate regions and binning protocol simulation", "coordsim"};
  app.require_subcommand(1);
  std::string config_path, rates, protocol_rates, n_list, objective;
  std::optional<double> fix_r0, fix_r12, fix_r21;
  RunConfig flags;
  bool exact = false, mc = false;

  app.add_option("--config", config_path, "JSON file with defaults for every flag");
  app.add_option("--channel", flags.channel_path);
  app.add_option("--scheme", flags.scheme_path);
  app.add_option("--joint", flags.joint_path);
  app.add_option("--out", flags.out_path);
  app.add_option("--seed", flags.seed);
  app.add_option("--workers", flags.workers)->check(CLI::PositiveNumber);
  app.add_option("--rates", rates, "R0,R12,R21");
  app.add_option("--protocol-rates", protocol_rates, "R0;R1,..,Rr;Rt1,..,Rtr");
  app.add_option("--n", n_list, "comma separated blocklengths");
  app.add_option("--trials", flags.trials);
  app.add_option("--delta", flags.delta);
  app.add_flag("--exact", exact);
  app.add_flag("--mc", mc);
  app.add_option("--budget", flags.budget);
  app.add_option("--r", flags.rounds);
  app.add_option("--max-alphabet", flags.max_alphabet);
  app.add_option("--restarts", flags.restarts);
  app.add_option("--objective", objective, "weights on R0,R12,R21");
  app.add_option("--fix-r0", fix_r0);
  app.add_option("--fix-r12", fix_r12);
  app.add_option("--fix-r21", fix_r21);
  app.add_option("--random-schemes", flags.random_schemes);
  app.add_option("--directions", flags.directions);
  app.add_option("--tol", flags.tol);
  app.add_flag("--drop-sum-constraints", flags.drop_sum_constraints);
  app.add_option("--instances", flags.instances);
  app.add_option("--corrupt-eps", flags.corrupt_eps);
  app.fallthrough();
  for (const char* name : {"region", "membership", "minrate", "fme-verify", "simulate", "sweep", "bounds-check"}) {
    app.add_subcommand(name);
  }

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  }

  RunConfig c;
  try {
    if (!config_path.empty()) apply_config_json(read_json_file(config_path), c);
    c.command = app.get_subcommands().front()->get_name();
    auto set = [&](const char* flag) { return app.count(flag) > 0; };
    if (set("--channel")) c.channel_path = flags.channel_path;
    if (set("--scheme")) c.scheme_path = flags.scheme_path;
    if (set("--joint")) c.joint_path = flags.joint_path;
    if (set("--out")) c.out_path = flags.out_path;
    if (set("--seed")) c.seed = flags.seed;
    if (set("--workers")) c.workers = flags.workers;
    if (set("--rates")) c.rates = parse_rate_point(rates);
    if (set("--protocol-rates")) c.protocol_rates = parse_protocol_rates(protocol_rates);
    if (set("--n")) c.n_list = parse_int_list(n_list);
    if (set("--trials")) c.trials = flags.trials;
    if (set("--delta")) c.delta = flags.delta;
    if (exact && mc) throw ParseError("--exact and --mc are exclusive");
    if (exact) c.mc_only = false;
    if (mc) c.mc_only = true;
    if (set("--budget")) c.budget = flags.budget;
    if (set("--r")) c.rounds = flags.rounds;
    if (set("--max-alphabet")) c.max_alphabet = flags.max_alphabet;
    if (set("--restarts")) c.restarts = flags.restarts;
    if (set("--objective")) c.objective = doubles(objective);
    if (fix_r0) c.fix_r0 = fix_r0;
    if (fix_r12) c.fix_r12 = fix_r12;
    if (fix_r21) c.fix_r21 = fix_r21;
    if (set("--random-schemes")) c.random_schemes = flags.random_schemes;
    if (set("--directions")) c.directions = flags.directions;
    if (set("--tol")) c.tol = flags.tol;
    if (flags.drop_sum_constraints) c.drop_sum_constraints = true;
    if (set("--instances")) c.instances = flags.instances;
    if (set("--corrupt-eps")) c.corrupt_eps = flags.corrupt_eps;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  }
  return run(c, out, err);
}

}  // namespace coordsim::cli
