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

#include "coordsim/osrb/code.hpp"
#include "coordsim/prob/dense_joint.hpp"
#include "coordsim/rate/scheme.hpp"
#include "coordsim/rng.hpp"

namespace coordsim {

struct TypicalityParams {
  double delta = 0.05;  // bits per symbol

  void check() const;
};

/// Channel plus scheme, flattened into the per-symbol tables the protocol uses.
/// Round i is generated from p(f_i | f_<i, x_owner) and decoded against
/// p(f_i | f_<i, x_other) taken from the scheme's joint.
class ProtocolModel {
 public:
  ProtocolModel(const ChannelSpec& channel, const AuxScheme& scheme);

  const ChannelSpec& channel() const { return channel_; }
  const AuxScheme& scheme() const { return scheme_; }
  const DenseJoint& joint() const { return joint_; }
  int r() const { return scheme_.r; }
  std::size_t f_size(int i) const { return scheme_.f_sizes[i - 1]; }
  std::size_t x_size(int terminal) const;
  std::size_t y_size(int terminal) const;
  static int owner(int i) { return i % 2 == 1 ? 1 : 2; }
  static int receiver(int i) { return i % 2 == 1 ? 2 : 1; }

  /// Row of round i's tables for one position: prefix symbols of rounds 1..i-1
  /// then the symbol of `terminal`'s input.
  std::size_t context(int i, int terminal, std::span<const Sequence> prefix, std::size_t t, std::uint8_t x) const;
  std::vector<std::size_t> contexts(int i, int terminal, std::span<const Sequence> prefix, const Sequence& x) const;

  /// p(f_i | ctx) from the scheme, rows laid out as [ctx][f_i].
  const std::vector<double>& generation_table(int i) const { return gen_[i - 1]; }
  /// p(f_i | f_<i, x_receiver) from the joint; zero rows where the context is impossible.
  const std::vector<double>& decoding_table(int i) const { return dec_[i - 1]; }
  /// H(F_i | F_<i, X_receiver).
  double decoding_entropy(int i) const { return dec_entropy_[i - 1]; }

  /// p(y_j | f_1..f_r, x_j) rows; `view` holds all r rounds as seen by terminal j.
  std::size_t output_context(int terminal, std::span<const Sequence> view, std::size_t t, std::uint8_t x) const;
  const std::vector<double>& output_table(int terminal) const { return terminal == 1 ? scheme_.out1.table : scheme_.out2.table; }

  /// -(1/n) log2 p(seq | ctx) under the decoding table; +inf on zero probability.
  double decoding_loglik(int i, std::span<const std::size_t> ctx, const Sequence& seq) const;
  bool typical(int i, std::span<const std::size_t> ctx, const Sequence& seq, const TypicalityParams& params) const;

  /// q(x1, x2) and q(y1, y2 | x1, x2) as flat tables.
  double q_x(std::uint8_t x1, std::uint8_t x2) const;
  double q_y(std::uint8_t x1, std::uint8_t x2, std::uint8_t y1, std::uint8_t y2) const;

 private:
  ChannelSpec channel_;
  AuxScheme scheme_;
  DenseJoint joint_;
  std::vector<std::vector<double>> gen_, dec_;
  std::vector<double> dec_entropy_;
};

/// p(seq | ctx) for every sequence in lexicographic order, from a [ctx][symbol]
/// table with k symbols.
std::vector<double> sequence_probabilities(const std::vector<double>& table, std::size_t k,
                                           std::span<const std::size_t> ctx);

enum class DecodeStatus { ok, ambiguous, empty };

const char* to_string(DecodeStatus s);

/// Decoder output. On ambiguous or empty candidate sets `sequence` holds the
/// substitute the protocol continues with.
struct DecodeResult {
  DecodeStatus status = DecodeStatus::empty;
  Sequence sequence;
  std::uint64_t typical = 0;

  bool error() const { return status != DecodeStatus::ok; }
};

/// Bins seen by the receiver of round i; omega is used only in round 1.
struct BinObservation {
  std::uint64_t omega = 0;
  std::uint64_t b = 0;
  std::uint64_t k = 0;
};

/// Candidates hashing to `obs` given the receiver's view `prefix` of rounds
/// 1..i-1, filtered by typicality against (prefix, x_receiver). Unique: ok.
/// Several: ambiguous, substitute the smallest typical one. None: empty,
/// substitute the smallest candidate in the bin, else the all-zero sequence.
/// Enumerates |F_i|^n sequences (at most 2^24).
DecodeResult sw_decode(const ProtocolModel& model, const BinningCode& code, int i, const BinObservation& obs,
                       std::span<const Sequence> prefix, const Sequence& x_receiver,
                       const TypicalityParams& params);

/// Random-binning ensemble version for long blocks. The competitors of `truth`
/// are counted by conditional type class; each lands in the observed bin
/// independently with probability 1 / (total bins). `truth_in_bin` is false
/// when the receiver's view differs from the sender's, so that the true
/// sequence is not a candidate.
DecodeResult sw_decode_ensemble(const ProtocolModel& model, const BinningCode& code, int i, const Sequence& truth,
                                bool truth_in_bin, std::span<const Sequence> prefix, const Sequence& x_receiver,
                                const TypicalityParams& params, Rng& rng);

/// log2 of the number of typical sequences given the per-position contexts.
double log2_typical_count(const ProtocolModel& model, int i, std::span<const std::size_t> ctx,
                          const TypicalityParams& params);

}  // namespace coordsim
