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
#include <cstdint>
#include <span>
#include <vector>

#include "coordsim/rate/scheme.hpp"

namespace coordsim {

/// Symbol sequence of length n; symbols index the round's alphabet.
using Sequence = std::vector<std::uint8_t>;

/// Lexicographic index of a sequence (first symbol most significant).
std::uint64_t sequence_code(const Sequence& s, std::size_t alphabet);
Sequence sequence_of(std::uint64_t code, std::size_t alphabet, int n);
/// alphabet^n, or 0 when it does not fit in 62 bits.
std::uint64_t sequence_count(std::size_t alphabet, int n);

/// Per-round rates in bits/symbol: R0 (common randomness), R_i (message) and
/// Rt_i (shared bin randomness).
struct ProtocolRates {
  double r0 = 0.0;
  std::vector<double> r;
  std::vector<double> rt;

  double r12() const;
  double r21() const;
};

ProtocolRates make_protocol_rates(double r0, std::vector<double> r, std::vector<double> rt);

/// ceil(2^(n rate)); throws InvalidArgument past 2^62.
std::uint64_t bin_count(double rate, int n);

/// Random binning realized by a keyed hash of (seed, map id, sequences).
class BinningCode {
 public:
  BinningCode(int n, std::vector<std::size_t> f_sizes, ProtocolRates rates, std::uint64_t seed);

  int n() const { return n_; }
  int r() const { return static_cast<int>(f_sizes_.size()); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<std::size_t>& f_sizes() const { return f_sizes_; }
  const ProtocolRates& rates() const { return rates_; }

  std::uint64_t omega_bins() const { return omega_bins_; }
  std::uint64_t b_bins(int i) const { return b_bins_[i - 1]; }
  std::uint64_t k_bins(int i) const { return k_bins_[i - 1]; }

  /// Bins of round i from the sequences of rounds 1..i (rounds.size() >= i).
  std::uint64_t omega(std::span<const Sequence> rounds) const;
  std::uint64_t b(int i, std::span<const Sequence> rounds) const;
  std::uint64_t k(int i, std::span<const Sequence> rounds) const;

  /// log2(bin range) / n, the rate actually used by each map.
  double nominal_rate(std::uint64_t bins) const;

 private:
  std::uint64_t hash(std::uint64_t map_id, std::span<const Sequence> rounds, int upto) const;

  int n_;
  std::vector<std::size_t> f_sizes_;
  ProtocolRates rates_;
  std::uint64_t seed_;
  std::uint64_t omega_bins_ = 1;
  std::vector<std::uint64_t> b_bins_, k_bins_;
};

BinningCode make_code(const AuxScheme& scheme, const ProtocolRates& rates, int n, std::uint64_t seed);

}  // namespace coordsim
