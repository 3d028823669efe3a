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


#include "coordsim/osrb/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "coordsim/error.hpp"
#include "coordsim/prob/info.hpp"
#include "coordsim/rate/region.hpp"
#include "coordsim/rng.hpp"
#include "osrb/internal.hpp"

namespace coordsim {

namespace {

Sequence draw_iid(const std::vector<double>& table, std::size_t k, std::span<const std::size_t> ctx, Rng& rng) {
  Sequence s(ctx.size());
  std::vector<double> row(k);
  for (std::size_t t = 0; t < ctx.size(); ++t) {
    std::copy_n(table.begin() + static_cast<std::ptrdiff_t>(ctx[t] * k), k, row.begin());
    s[t] = static_cast<std::uint8_t>(rng.categorical(row));
  }
  return s;
}

void check_options(const SimOptions& o) {
  o.typicality.check();
  if (o.workers < 1) throw InvalidArgument("workers must be at least 1");
  if (!(o.budget > 0.0)) throw InvalidArgument("budget must be positive");
}

}  // namespace

Trace run_protocol_b(const ProtocolModel& model, const BinningCode& code, const Sequence& x1, const Sequence& x2,
                     std::uint64_t omega, const std::vector<std::uint64_t>& b, Rng& rng, const SimOptions& options) {
  check_options(options);
  const int n = code.n(), r = model.r();
  if (code.r() != r || code.f_sizes() != model.scheme().f_sizes) throw InvalidArgument("code does not match the scheme");
  if (static_cast<int>(x1.size()) != n || static_cast<int>(x2.size()) != n) throw InvalidArgument("inputs must have length n");
  for (std::size_t t = 0; t < x1.size(); ++t) {
    if (x1[t] >= model.x_size(1) || x2[t] >= model.x_size(2)) throw InvalidArgument("input symbol out of range");
  }
  if (omega >= code.omega_bins()) throw InvalidArgument("omega out of range");
  if (static_cast<int>(b.size()) != r) throw InvalidArgument("need one b per round");
  for (int i = 1; i <= r; ++i) {
    if (b[i - 1] >= code.b_bins(i)) throw InvalidArgument("b out of range");
  }

  Trace tr;
  tr.x1 = x1;
  tr.x2 = x2;
  tr.omega = omega;
  tr.b = b;
  std::vector<Sequence> v1(r), v2(r);
  for (int i = 1; i <= r; ++i) {
    const int o = ProtocolModel::owner(i);
    auto& vo = o == 1 ? v1 : v2;
    auto& vr = o == 1 ? v2 : v1;
    const Sequence& xo = o == 1 ? x1 : x2;
    const Sequence& xr = o == 1 ? x2 : x1;
    const std::size_t k = model.f_size(i);
    const auto ctx = model.contexts(i, o, std::span(vo).first(i - 1), xo);
    const std::uint64_t total = sequence_count(k, n);

    RoundTrace rt;
    std::vector<Sequence> rounds(vo.begin(), vo.begin() + (i - 1));
    if (total != 0 && total <= options.enumeration_limit) {
      auto w = sequence_probabilities(model.generation_table(i), k, ctx);
      std::vector<double> in_bin(w.size(), 0.0);
      double mass = 0.0;
      rounds.emplace_back();
      for (std::uint64_t c = 0; c < total; ++c) {
        if (w[c] == 0.0) continue;
        rounds.back() = sequence_of(c, k, n);
        if (i == 1 && code.omega(rounds) != omega) continue;
        if (code.b(i, rounds) != b[i - 1]) continue;
        in_bin[c] = w[c];
        mass += w[c];
      }
      rt.f = sequence_of(rng.categorical(mass > 0.0 ? in_bin : w), k, n);
      rounds.back() = rt.f;
      rt.bins = {omega, b[i - 1], code.k(i, rounds)};
      const auto dec = sw_decode(model, code, i, rt.bins, std::span(vr).first(i - 1), xr, options.typicality);
      rt.status = dec.status;
      rt.f_hat = dec.sequence;
    } else {
      rt.f = draw_iid(model.generation_table(i), k, ctx, rng);
      rounds.push_back(rt.f);
      rt.bins = {omega, b[i - 1], code.k(i, rounds)};
      const bool same_view = std::equal(vo.begin(), vo.begin() + (i - 1), vr.begin());
      const auto dec = sw_decode_ensemble(model, code, i, rt.f, same_view, std::span(vr).first(i - 1), xr,
                                          options.typicality, rng);
      rt.status = dec.status;
      rt.f_hat = dec.sequence;
      rt.ensemble = true;
    }
    vo[i - 1] = rt.f;
    vr[i - 1] = rt.f_hat;
    tr.rounds.push_back(std::move(rt));
  }
  for (int term = 1; term <= 2; ++term) {
    const auto& view = term == 1 ? v1 : v2;
    const auto& x = term == 1 ? x1 : x2;
    auto& y = term == 1 ? tr.y1 : tr.y2;
    const std::size_t ny = model.y_size(term);
    const auto& tab = model.output_table(term);
    std::vector<double> row(ny);
    y.resize(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
      const std::size_t c = model.output_context(term, view, static_cast<std::size_t>(t), x[t]);
      std::copy_n(tab.begin() + static_cast<std::ptrdiff_t>(c * ny), ny, row.begin());
      y[t] = static_cast<std::uint8_t>(rng.categorical(row));
    }
  }
  return tr;
}

double empirical_tv(const ProtocolModel& model, const Trace& trace) {
  const std::size_t n1 = model.x_size(1), n2 = model.x_size(2), m1 = model.y_size(1), m2 = model.y_size(2);
  const std::size_t n = trace.x1.size();
  if (n == 0 || trace.x2.size() != n || trace.y1.size() != n || trace.y2.size() != n) {
    throw InvalidArgument("trace sequences must share a positive length");
  }
  std::vector<double> type(n1 * n2 * m1 * m2, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    type[((trace.x1[t] * n2 + trace.x2[t]) * m1 + trace.y1[t]) * m2 + trace.y2[t]] += 1.0 / static_cast<double>(n);
  }
  double s = 0.0;
  std::size_t cell = 0;
  for (std::size_t a = 0; a < n1; ++a) {
    for (std::size_t b = 0; b < n2; ++b) {
      for (std::size_t c = 0; c < m1; ++c) {
        for (std::size_t d = 0; d < m2; ++d, ++cell) {
          const auto u8 = [](std::size_t v) { return static_cast<std::uint8_t>(v); };
          s += std::abs(type[cell] - model.q_x(u8(a), u8(b)) * model.q_y(u8(a), u8(b), u8(c), u8(d)));
        }
      }
    }
  }
  return 0.5 * s;
}

EmpiricalStats weighted_stats(std::vector<std::pair<double, double>> values) {
  EmpiricalStats st;
  if (values.empty()) return st;
  std::sort(values.begin(), values.end());
  for (auto [v, w] : values) {
    st.weight += w;
    st.mean += v * w;
  }
  st.mean /= st.weight;
  st.max = values.back().first;
  auto quantile = [&](double q) {
    double acc = 0.0;
    for (auto [v, w] : values) {
      acc += w;
      if (acc >= q * st.weight * (1.0 - 1e-12)) return v;
    }
    return values.back().first;
  };
  st.q10 = quantile(0.1);
  st.median = quantile(0.5);
  st.q90 = quantile(0.9);
  return st;
}

EmpiricalStats empirical_coordination_stats(const ProtocolModel& model, const std::vector<Trace>& traces) {
  if (traces.empty()) throw InvalidArgument("need at least one trace");
  std::vector<std::pair<double, double>> v;
  for (const auto& t : traces) v.emplace_back(empirical_tv(model, t), 1.0);
  return weighted_stats(std::move(v));
}

ProtocolResult simulate_mc(const ProtocolModel& model, const BinningCode& code, int trials, std::uint64_t seed,
                           const SimOptions& options) {
  check_options(options);
  if (trials < 1) throw InvalidArgument("need at least one trial");
  const int r = model.r(), n = code.n();
  const auto qx = model.channel().q_x().mass();
  const std::vector<double> qxv(qx.begin(), qx.end());
  const std::size_t n2 = model.x_size(2);

  struct Out {
    std::vector<char> err;
    std::vector<std::uint64_t> k;
    double tv = 0.0;
    Trace trace;
  };
  std::vector<Out> out(static_cast<std::size_t>(trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (int t; (t = next++) < trials && !failed;) {
      try {
        Rng rng(derive_seed(seed, 41, static_cast<std::uint64_t>(t)));
        Sequence x1(static_cast<std::size_t>(n)), x2(static_cast<std::size_t>(n));
        for (int p = 0; p < n; ++p) {
          const auto c = rng.categorical(qxv);
          x1[p] = static_cast<std::uint8_t>(c / n2);
          x2[p] = static_cast<std::uint8_t>(c % n2);
        }
        const std::uint64_t omega = rng.below(code.omega_bins());
        std::vector<std::uint64_t> b(static_cast<std::size_t>(r));
        for (int i = 1; i <= r; ++i) b[i - 1] = rng.below(code.b_bins(i));
        auto tr = run_protocol_b(model, code, x1, x2, omega, b, rng, options);
        auto& o = out[static_cast<std::size_t>(t)];
        for (const auto& rt : tr.rounds) {
          o.err.push_back(rt.error() ? 1 : 0);
          o.k.push_back(rt.bins.k);
        }
        o.tv = empirical_tv(model, tr);
        if (options.keep_traces) o.trace = std::move(tr);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < std::min(options.workers, trials); ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  ProtocolResult res;
  res.mode = "monte-carlo";
  res.n = n;
  res.trials = trials;
  res.sw_error_rate.assign(static_cast<std::size_t>(r), 0.0);
  std::vector<std::map<std::uint64_t, double>> kd(static_cast<std::size_t>(r));
  std::vector<std::pair<double, double>> tvs;
  for (auto& o : out) {
    for (int i = 0; i < r; ++i) {
      res.sw_error_rate[i] += o.err[i];
      kd[i][o.k[i]] += 1.0;
    }
    tvs.emplace_back(o.tv, 1.0);
    if (options.keep_traces) res.traces.push_back(std::move(o.trace));
  }
  for (int i = 0; i < r; ++i) {
    res.sw_error_rate[i] /= trials;
    std::vector<double> p;
    for (auto [k, c] : kd[i]) p.push_back(c / trials);
    res.k_entropy.push_back(entropy_bits(p) / n);
    res.nominal_rate.push_back(code.nominal_rate(code.k_bins(i + 1)));
  }
  res.empirical = weighted_stats(std::move(tvs));
  return res;
}

const char* to_string(MarginClass c) {
  switch (c) {
    case MarginClass::interior:
      return "interior";
    case MarginClass::boundary:
      return "boundary";
    case MarginClass::exterior:
      return "exterior";
  }
  return "?";
}

MarginReport rate_margin_report(const DenseJoint& joint, const ProtocolRates& rates, double tol) {
  const int r = rounds_of(joint);
  if (static_cast<int>(rates.r.size()) != r || rates.rt.size() != rates.r.size()) {
    throw InvalidArgument("rates do not match the joint's rounds");
  }
  MarginReport rep;
  rep.r12 = rates.r12();
  rep.r21 = rates.r21();
  auto add = [&](std::string name, double slack, bool strict) {
    ConstraintMargin m{std::move(name), slack, strict, MarginClass::interior};
    if (slack < -tol) {
      m.cls = MarginClass::exterior;
    } else if (slack <= tol) {
      m.cls = MarginClass::boundary;
    }
    rep.constraints.push_back(std::move(m));
  };
  NameSet before;
  double rt_sum = 0.0;
  for (int i = 1; i <= r; ++i) {
    const std::string fi = f_name(i);
    NameSet other = before, own = before;
    other.push_back(other_of_round(i));
    own.push_back(owner_of_round(i));
    const double h_other = entropy(joint, {fi}, other).bits;
    const double h_own = entropy(joint, {fi}, own).bits;
    const double ri = rates.r[i - 1], rti = rates.rt[i - 1];
    if (i == 1) {
      add("c1", ri + rates.r0 + rti - h_other, false);
      add("c3V1", h_own - rates.r0 - rti, true);
    } else {
      add("c2[" + std::to_string(i) + "]", ri + rti - h_other, false);
      add("c3V2[" + std::to_string(i) + "]", h_own - rti, true);
    }
    before.push_back(fi);
  }
  for (int i = 1; i <= r; ++i) {
    rt_sum += rates.rt[i - 1];
    NameSet fs(before.begin(), before.begin() + i);
    add("c44[" + std::to_string(i) + "]", entropy(joint, fs, {"X1", "X2", "Y1", "Y2"}).bits - rt_sum, true);
  }
  for (const auto& m : rep.constraints) {
    if (m.cls == MarginClass::exterior) {
      rep.cls = MarginClass::exterior;
    } else if (m.cls == MarginClass::boundary && rep.cls == MarginClass::interior) {
      rep.cls = MarginClass::boundary;
    }
  }
  return rep;
}

}  // namespace coordsim
