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


#include "coordsim/osrb/code.hpp"

#include <cmath>
#include <cstring>

#include "coordsim/error.hpp"
#include "coordsim/rng.hpp"

namespace coordsim {

std::uint64_t sequence_code(const Sequence& s, std::size_t alphabet) {
  std::uint64_t c = 0;
  for (auto v : s) c = c * alphabet + v;
  return c;
}

Sequence sequence_of(std::uint64_t code, std::size_t alphabet, int n) {
  Sequence s(static_cast<std::size_t>(n));
  for (int t = n; t-- > 0;) {
    s[t] = static_cast<std::uint8_t>(code % alphabet);
    code /= alphabet;
  }
  return s;
}

std::uint64_t sequence_count(std::size_t alphabet, int n) {
  std::uint64_t c = 1;
  for (int t = 0; t < n; ++t) {
    if (c > (std::uint64_t{1} << 62) / alphabet) return 0;
    c *= alphabet;
  }
  return c;
}

double ProtocolRates::r12() const {
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); i += 2) s += r[i];
  return s;
}

double ProtocolRates::r21() const {
  double s = 0.0;
  for (std::size_t i = 1; i < r.size(); i += 2) s += r[i];
  return s;
}

ProtocolRates make_protocol_rates(double r0, std::vector<double> r, std::vector<double> rt) {
  auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  if (!ok(r0)) throw InvalidArgument("R0 must be a non-negative number");
  if (r.empty() || r.size() != rt.size()) throw InvalidArgument("need one R and one Rt per round");
  for (double v : r) {
    if (!ok(v)) throw InvalidArgument("round rates must be non-negative numbers");
  }
  for (double v : rt) {
    if (!ok(v)) throw InvalidArgument("round rates must be non-negative numbers");
  }
  return {r0, std::move(r), std::move(rt)};
}

std::uint64_t bin_count(double rate, int n) {
  if (!(std::isfinite(rate) && rate >= 0.0) || n < 1) throw InvalidArgument("bin count needs rate >= 0 and n >= 1");
  const double e = rate * n;
  if (e > 62.0) throw InvalidArgument("bin count exceeds 2^62");
  const double v = std::exp2(e);
  // exp2 of a float product can land a hair above an exact integer.
  const double near = std::round(v);
  const double c = std::abs(v - near) <= 1e-12 * v ? near : std::ceil(v);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(c));
}

BinningCode::BinningCode(int n, std::vector<std::size_t> f_sizes, ProtocolRates rates, std::uint64_t seed)
    : n_(n), f_sizes_(std::move(f_sizes)), rates_(std::move(rates)), seed_(seed) {
  if (n < 1) throw InvalidArgument("blocklength must be at least 1");
  if (f_sizes_.empty() || rates_.r.size() != f_sizes_.size()) throw InvalidArgument("rates do not match the round count");
  rates_ = make_protocol_rates(rates_.r0, rates_.r, rates_.rt);
  for (auto s : f_sizes_) {
    if (s == 0 || s > 255) throw InvalidArgument("auxiliary alphabets must have 1..255 symbols");
  }
  omega_bins_ = bin_count(rates_.r0, n);
  for (std::size_t i = 0; i < f_sizes_.size(); ++i) {
    b_bins_.push_back(bin_count(rates_.rt[i], n));
    k_bins_.push_back(bin_count(rates_.r[i], n));
  }
}

std::uint64_t BinningCode::hash(std::uint64_t map_id, std::span<const Sequence> rounds, int upto) const {
  std::uint64_t h = mix64(seed_ ^ mix64(map_id));
  for (int i = 0; i < upto; ++i) {
    const auto& s = rounds[i];
    h = mix64(h ^ (0x5bd1e995ULL * (static_cast<std::uint64_t>(i) + 1) + s.size()));
    for (std::size_t p = 0; p < s.size(); p += 8) {
      std::uint64_t w = 0;
      std::memcpy(&w, s.data() + p, std::min<std::size_t>(8, s.size() - p));
      h = mix64(h ^ w);
    }
  }
  return h;
}

namespace {

std::uint64_t scale(std::uint64_t h, std::uint64_t bins) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(h) * bins) >> 64);
}

void need(std::span<const Sequence> rounds, int i) {
  if (static_cast<int>(rounds.size()) < i) throw InvalidArgument("bin map needs the sequences of earlier rounds");
}

}  // namespace

std::uint64_t BinningCode::omega(std::span<const Sequence> rounds) const {
  need(rounds, 1);
  return omega_bins_ == 1 ? 0 : scale(hash(1, rounds, 1), omega_bins_);
}

std::uint64_t BinningCode::b(int i, std::span<const Sequence> rounds) const {
  need(rounds, i);
  const auto bins = b_bins(i);
  return bins == 1 ? 0 : scale(hash(16 * static_cast<std::uint64_t>(i) + 2, rounds, i), bins);
}

std::uint64_t BinningCode::k(int i, std::span<const Sequence> rounds) const {
  need(rounds, i);
  const auto bins = k_bins(i);
  return bins == 1 ? 0 : scale(hash(16 * static_cast<std::uint64_t>(i) + 3, rounds, i), bins);
}

double BinningCode::nominal_rate(std::uint64_t bins) const {
  return std::log2(static_cast<double>(bins)) / static_cast<double>(n_);
}

BinningCode make_code(const AuxScheme& scheme, const ProtocolRates& rates, int n, std::uint64_t seed) {
  if (rates.r.size() != static_cast<std::size_t>(scheme.r)) throw InvalidArgument("rates do not match the scheme's rounds");
  return BinningCode(n, scheme.f_sizes, rates, seed);
}

}  // namespace coordsim
