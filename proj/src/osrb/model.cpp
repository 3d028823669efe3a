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


#include "coordsim/osrb/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "coordsim/error.hpp"
#include "coordsim/prob/info.hpp"
#include "coordsim/rate/region.hpp"

namespace coordsim {

void TypicalityParams::check() const {
  if (!(std::isfinite(delta) && delta > 0.0)) throw InvalidArgument("typicality delta must be positive");
}

ProtocolModel::ProtocolModel(const ChannelSpec& channel, const AuxScheme& scheme)
    : channel_(channel), scheme_(scheme), joint_(assemble_joint(channel, scheme)) {
  for (auto s : scheme_.f_sizes) {
    if (s > 255) throw InvalidArgument("auxiliary alphabets above 255 symbols are not simulated");
  }
  if (channel.x1().size() > 255 || channel.x2().size() > 255 || channel.y1().size() > 255 ||
      channel.y2().size() > 255) {
    throw InvalidArgument("channel alphabets above 255 symbols are not simulated");
  }
  NameSet before;
  for (int i = 1; i <= r(); ++i) {
    gen_.push_back(scheme_.rounds[i - 1].table);
    NameSet names = before;
    names.push_back(receiver(i) == 1 ? "X1" : "X2");
    NameSet given = names;
    names.push_back(f_name(i));
    auto m = joint_.marginal(names);
    std::vector<double> t(m.mass().begin(), m.mass().end());
    const std::size_t k = f_size(i);
    for (std::size_t row = 0; row < t.size() / k; ++row) {
      double s = 0.0;
      for (std::size_t a = 0; a < k; ++a) s += t[row * k + a];
      for (std::size_t a = 0; a < k; ++a) t[row * k + a] = s > 0.0 ? t[row * k + a] / s : 0.0;
    }
    dec_.push_back(std::move(t));
    dec_entropy_.push_back(entropy(joint_, {f_name(i)}, given).bits);
    before.push_back(f_name(i));
  }
}

std::size_t ProtocolModel::x_size(int terminal) const {
  return terminal == 1 ? channel_.x1().size() : channel_.x2().size();
}

std::size_t ProtocolModel::y_size(int terminal) const {
  return terminal == 1 ? channel_.y1().size() : channel_.y2().size();
}

std::size_t ProtocolModel::context(int i, int terminal, std::span<const Sequence> prefix, std::size_t t,
                                   std::uint8_t x) const {
  std::size_t c = 0;
  for (int j = 1; j < i; ++j) c = c * f_size(j) + prefix[j - 1][t];
  return c * x_size(terminal) + x;
}

std::vector<std::size_t> ProtocolModel::contexts(int i, int terminal, std::span<const Sequence> prefix,
                                                 const Sequence& x) const {
  if (static_cast<int>(prefix.size()) < i - 1) throw InvalidArgument("context needs every earlier round");
  std::vector<std::size_t> c(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) c[t] = context(i, terminal, prefix, t, x[t]);
  return c;
}

std::size_t ProtocolModel::output_context(int terminal, std::span<const Sequence> view, std::size_t t,
                                          std::uint8_t x) const {
  return context(r() + 1, terminal, view, t, x);
}

double ProtocolModel::decoding_loglik(int i, std::span<const std::size_t> ctx, const Sequence& seq) const {
  const auto& tab = dec_[i - 1];
  const std::size_t k = f_size(i);
  double s = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const double p = tab[ctx[t] * k + seq[t]];
    if (p <= 0.0) return std::numeric_limits<double>::infinity();
    s -= std::log2(p);
  }
  return s / static_cast<double>(seq.size());
}

bool ProtocolModel::typical(int i, std::span<const std::size_t> ctx, const Sequence& seq,
                            const TypicalityParams& params) const {
  const double ll = decoding_loglik(i, ctx, seq);
  return std::isfinite(ll) && std::abs(ll - decoding_entropy(i)) <= params.delta + 1e-12;
}

double ProtocolModel::q_x(std::uint8_t x1, std::uint8_t x2) const {
  return channel_.q_x().mass()[x1 * channel_.x2().size() + x2];
}

double ProtocolModel::q_y(std::uint8_t x1, std::uint8_t x2, std::uint8_t y1, std::uint8_t y2) const {
  const std::size_t ny1 = channel_.y1().size(), ny2 = channel_.y2().size();
  return channel_.kernel()[((x1 * channel_.x2().size() + x2) * ny1 + y1) * ny2 + y2];
}

std::vector<double> sequence_probabilities(const std::vector<double>& table, std::size_t k,
                                           std::span<const std::size_t> ctx) {
  std::vector<double> p{1.0}, next;
  for (auto c : ctx) {
    next.assign(p.size() * k, 0.0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] == 0.0) continue;
      for (std::size_t a = 0; a < k; ++a) next[j * k + a] = p[j] * table[c * k + a];
    }
    p.swap(next);
  }
  return p;
}

const char* to_string(DecodeStatus s) {
  switch (s) {
    case DecodeStatus::ok:
      return "ok";
    case DecodeStatus::ambiguous:
      return "ambiguous";
    case DecodeStatus::empty:
      return "empty";
  }
  return "?";
}

namespace {

void check_observation(const BinningCode& code, int i, const BinObservation& obs) {
  if (i < 1 || i > code.r()) throw InvalidArgument("round index out of range");
  if ((i == 1 && obs.omega >= code.omega_bins()) || obs.b >= code.b_bins(i) || obs.k >= code.k_bins(i)) {
    throw InvalidArgument("observed bin index out of range");
  }
}

// Typical conditional type classes for one grouping of positions by context.
struct TypeClasses {
  std::vector<std::size_t> group_ctx;
  std::vector<std::size_t> group_size;
  std::vector<std::vector<std::vector<std::uint32_t>>> comps;  // per group, its compositions
  std::vector<std::uint32_t> leaves;                            // typical picks, one index per group
  std::vector<double> leaf_log2;                                // log2 class size
  double log2_total = -std::numeric_limits<double>::infinity();
};

double log2_sum(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log2(1.0 + std::exp2(b - a));
}

void compositions(std::size_t n, std::size_t k, std::vector<std::uint32_t>& cur,
                  std::vector<std::vector<std::uint32_t>>& out) {
  if (cur.size() + 1 == k) {
    cur.push_back(static_cast<std::uint32_t>(n));
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (std::size_t m = 0; m <= n; ++m) {
    cur.push_back(static_cast<std::uint32_t>(m));
    compositions(n - m, k, cur, out);
    cur.pop_back();
  }
}

constexpr std::size_t kTypeBudget = 4'000'000;

const TypeClasses& type_classes(const ProtocolModel& model, int i, std::span<const std::size_t> ctx,
                                const TypicalityParams& params) {
  std::map<std::size_t, std::size_t> groups;
  for (auto c : ctx) ++groups[c];
  const std::size_t k = model.f_size(i);
  const auto& tab = model.decoding_table(i);

  std::ostringstream key;
  key.precision(17);
  key << k << ' ' << ctx.size() << ' ' << params.delta << ' ' << model.decoding_entropy(i);
  for (auto [c, m] : groups) {
    key << " |" << m;
    for (std::size_t a = 0; a < k; ++a) key << ' ' << tab[c * k + a];
  }
  thread_local std::map<std::string, TypeClasses> cache;
  auto it = cache.find(key.str());
  if (it != cache.end()) return it->second;
  if (cache.size() > 4096) cache.clear();

  TypeClasses tc;
  std::size_t combos = 1;
  for (auto [c, m] : groups) {
    tc.group_ctx.push_back(c);
    tc.group_size.push_back(m);
    std::vector<std::uint32_t> cur;
    tc.comps.emplace_back();
    compositions(m, k, cur, tc.comps.back());
    combos *= tc.comps.back().size();
    if (combos > kTypeBudget) throw BudgetExceeded("too many conditional type classes for the ensemble decoder");
  }
  const std::size_t g = tc.group_ctx.size();
  // Per group, per composition: log-likelihood (bits) and log2 multinomial.
  std::vector<std::vector<double>> ll(g), lc(g);
  for (std::size_t j = 0; j < g; ++j) {
    for (const auto& m : tc.comps[j]) {
      double l = 0.0, c = std::lgamma(static_cast<double>(tc.group_size[j]) + 1.0);
      for (std::size_t a = 0; a < k; ++a) {
        if (m[a] == 0) continue;
        const double p = tab[tc.group_ctx[j] * k + a];
        l = p > 0.0 && std::isfinite(l) ? l - m[a] * std::log2(p) : std::numeric_limits<double>::infinity();
        c -= std::lgamma(static_cast<double>(m[a]) + 1.0);
      }
      ll[j].push_back(l);
      lc[j].push_back(c / std::log(2.0));
    }
  }
  const double n = static_cast<double>(ctx.size());
  const double h = model.decoding_entropy(i);
  std::vector<std::uint32_t> pick(g, 0);
  for (;;) {
    double l = 0.0, c = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
      l += ll[j][pick[j]];
      c += lc[j][pick[j]];
    }
    if (std::isfinite(l) && std::abs(l / n - h) <= params.delta + 1e-12) {
      tc.leaves.insert(tc.leaves.end(), pick.begin(), pick.end());
      tc.leaf_log2.push_back(c);
      tc.log2_total = log2_sum(tc.log2_total, c);
    }
    std::size_t j = g;
    while (j-- > 0) {
      if (++pick[j] < tc.comps[j].size()) break;
      pick[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  return cache.emplace(key.str(), std::move(tc)).first->second;
}

Sequence sample_typical(const TypeClasses& tc, std::span<const std::size_t> ctx, Rng& rng) {
  const std::size_t g = tc.group_ctx.size();
  double u = rng.uniform();
  std::size_t leaf = tc.leaf_log2.size() - 1;
  for (std::size_t l = 0; l < tc.leaf_log2.size(); ++l) {
    const double w = std::exp2(tc.leaf_log2[l] - tc.log2_total);
    if (u < w) {
      leaf = l;
      break;
    }
    u -= w;
  }
  Sequence s(ctx.size(), 0);
  for (std::size_t j = 0; j < g; ++j) {
    std::vector<std::size_t> pos;
    for (std::size_t t = 0; t < ctx.size(); ++t) {
      if (ctx[t] == tc.group_ctx[j]) pos.push_back(t);
    }
    for (std::size_t a = pos.size(); a > 1; --a) std::swap(pos[a - 1], pos[rng.below(a)]);
    const auto& m = tc.comps[j][tc.leaves[leaf * g + j]];
    std::size_t p = 0;
    for (std::size_t a = 0; a < m.size(); ++a) {
      for (std::uint32_t c = 0; c < m[a]; ++c) s[pos[p++]] = static_cast<std::uint8_t>(a);
    }
  }
  return s;
}

std::uint64_t saturate(double v) {
  return v >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(std::llround(v));
}

}  // namespace

double log2_typical_count(const ProtocolModel& model, int i, std::span<const std::size_t> ctx,
                          const TypicalityParams& params) {
  params.check();
  return type_classes(model, i, ctx, params).log2_total;
}

DecodeResult sw_decode(const ProtocolModel& model, const BinningCode& code, int i, const BinObservation& obs,
                       std::span<const Sequence> prefix, const Sequence& x_receiver,
                       const TypicalityParams& params) {
  params.check();
  check_observation(code, i, obs);
  if (static_cast<int>(x_receiver.size()) != code.n()) throw InvalidArgument("side information has the wrong length");
  const std::size_t k = model.f_size(i);
  const std::uint64_t total = sequence_count(k, code.n());
  if (total == 0 || total > (std::uint64_t{1} << 24)) throw BudgetExceeded("candidate enumeration exceeds 2^24 sequences");
  if (k == 1) return {DecodeStatus::ok, Sequence(static_cast<std::size_t>(code.n()), 0), 1};
  const auto ctx = model.contexts(i, ProtocolModel::receiver(i), prefix, x_receiver);

  std::vector<Sequence> rounds(prefix.begin(), prefix.begin() + (i - 1));
  rounds.emplace_back();
  DecodeResult res;
  bool have_candidate = false;
  Sequence first_candidate;
  for (std::uint64_t c = 0; c < total; ++c) {
    rounds.back() = sequence_of(c, k, code.n());
    if (i == 1 && code.omega(rounds) != obs.omega) continue;
    if (code.b(i, rounds) != obs.b || code.k(i, rounds) != obs.k) continue;
    if (!have_candidate) {
      have_candidate = true;
      first_candidate = rounds.back();
    }
    if (model.typical(i, ctx, rounds.back(), params)) {
      if (res.typical++ == 0) res.sequence = rounds.back();
    }
  }
  if (res.typical == 1) {
    res.status = DecodeStatus::ok;
  } else if (res.typical > 1) {
    res.status = DecodeStatus::ambiguous;
  } else {
    res.status = DecodeStatus::empty;
    res.sequence = have_candidate ? first_candidate : Sequence(static_cast<std::size_t>(code.n()), 0);
  }
  return res;
}

DecodeResult sw_decode_ensemble(const ProtocolModel& model, const BinningCode& code, int i, const Sequence& truth,
                                bool truth_in_bin, std::span<const Sequence> prefix, const Sequence& x_receiver,
                                const TypicalityParams& params, Rng& rng) {
  params.check();
  if (i < 1 || i > code.r()) throw InvalidArgument("round index out of range");
  if (static_cast<int>(x_receiver.size()) != code.n() || static_cast<int>(truth.size()) != code.n()) {
    throw InvalidArgument("sequence has the wrong length");
  }
  if (model.f_size(i) == 1) return {DecodeStatus::ok, Sequence(truth.size(), 0), 1};
  const auto ctx = model.contexts(i, ProtocolModel::receiver(i), prefix, x_receiver);
  const auto& tc = type_classes(model, i, ctx, params);
  const bool truth_typical = truth_in_bin && model.typical(i, ctx, truth, params);

  double log2_bins = std::log2(static_cast<double>(code.b_bins(i))) + std::log2(static_cast<double>(code.k_bins(i)));
  if (i == 1) log2_bins += std::log2(static_cast<double>(code.omega_bins()));
  double others = std::exp2(tc.log2_total);
  if (truth_typical) others = std::max(0.0, others - 1.0);
  const double lambda = std::exp2(std::log2(others) - log2_bins);
  const double p_none = others == 0.0 ? 1.0 : std::exp(others * std::log1p(-std::exp2(-log2_bins)));

  DecodeResult res;
  if (rng.uniform() < p_none) {
    if (truth_typical) {
      res.status = DecodeStatus::ok;
      res.sequence = truth;
      res.typical = 1;
    } else {
      res.status = DecodeStatus::empty;
      res.sequence.resize(truth.size());
      for (auto& s : res.sequence) s = static_cast<std::uint8_t>(rng.below(model.f_size(i)));
    }
    return res;
  }
  // At least one typical competitor shares the bin.
  const double p_single = lambda > 1e-12 ? lambda * std::exp(-lambda) / -std::expm1(-lambda) : 1.0;
  const std::uint64_t competitors = rng.uniform() < p_single ? 1 : 2;
  res.typical = competitors + (truth_typical ? 1 : 0);
  res.status = res.typical == 1 ? DecodeStatus::ok : DecodeStatus::ambiguous;
  if (res.status == DecodeStatus::ambiguous) res.typical = std::max(res.typical, saturate(lambda) + (truth_typical ? 1 : 0));
  if (truth_typical && rng.uniform() * static_cast<double>(res.typical) < 1.0) {
    res.sequence = truth;
  } else {
    res.sequence = sample_typical(tc, ctx, rng);
  }
  return res;
}

}  // namespace coordsim
