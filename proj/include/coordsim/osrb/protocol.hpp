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

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "coordsim/osrb/code.hpp"
#include "coordsim/osrb/model.hpp"

namespace coordsim {

/// A: omega is a bin of f1 and every f is drawn i.i.d. from the scheme.
/// B: omega and b are exogenous uniform randomness; each round's sender draws
///    its sequence conditioned on them.
enum class InducedMode { a, b };

struct SimOptions {
  TypicalityParams typicality;
  /// Rounds with at most this many candidate sequences run on the realized
  /// code; longer rounds use the ensemble decoder and unconstrained draws.
  std::uint64_t enumeration_limit = std::uint64_t{1} << 16;
  double budget = 1e8;  // exact mode: weighted terms
  int workers = 1;
  bool keep_pmf = false;
  bool keep_traces = false;
};

struct RoundTrace {
  Sequence f;
  Sequence f_hat;
  BinObservation bins;
  DecodeStatus status = DecodeStatus::ok;
  bool ensemble = false;

  bool error() const { return status != DecodeStatus::ok || f != f_hat; }
};

struct Trace {
  Sequence x1, x2, y1, y2;
  std::uint64_t omega = 0;
  std::vector<std::uint64_t> b;
  std::vector<RoundTrace> rounds;
};

/// One run of the interactive protocol on given inputs and shared randomness.
Trace run_protocol_b(const ProtocolModel& model, const BinningCode& code, const Sequence& x1, const Sequence& x2,
                     std::uint64_t omega, const std::vector<std::uint64_t>& b, Rng& rng,
                     const SimOptions& options = {});

struct EmpiricalStats {
  double weight = 0.0;  // traces, or probability mass in exact mode
  double mean = 0.0;
  double q10 = 0.0;
  double median = 0.0;
  double q90 = 0.0;
  double max = 0.0;
};

/// Single-letter TV between the type of (x1, x2, y1, y2) and q(x) q(y|x).
double empirical_tv(const ProtocolModel& model, const Trace& trace);
EmpiricalStats empirical_coordination_stats(const ProtocolModel& model, const std::vector<Trace>& traces);

struct ProtocolResult {
  std::string mode;  // "exact" or "monte-carlo"
  int n = 0;
  int trials = 0;
  double tv_to_target = std::numeric_limits<double>::quiet_NaN();
  double total_mass = 1.0;
  std::vector<double> sw_error_rate;  // per round
  std::vector<double> k_entropy;      // H(K_i) in bits/symbol
  std::vector<double> nominal_rate;   // log2(k bins)/n per round
  EmpiricalStats empirical;
  /// Exact mode with keep_pmf: layout [x1^n][x2^n][y1^n][y2^n], sequences in
  /// lexicographic order.
  std::vector<double> induced;
  std::vector<Trace> traces;
};

/// Monte-Carlo: x ~ q i.i.d., omega and b uniform; trial t uses its own stream.
ProtocolResult simulate_mc(const ProtocolModel& model, const BinningCode& code, int trials, std::uint64_t seed,
                           const SimOptions& options = {});

/// Exact induced law of (X^n, Y^n) under the fixed code. b is averaged
/// uniformly unless `b_fixed` (zero-based bin per round) is given; omega is
/// always averaged in mode B.
ProtocolResult exact_induced_pmf(const ProtocolModel& model, const BinningCode& code,
                                 const std::optional<std::vector<std::uint64_t>>& b_fixed = std::nullopt,
                                 InducedMode mode = InducedMode::b, const SimOptions& options = {});

/// TV between the mode A and mode B induced laws.
double exact_mode_gap(const ProtocolModel& model, const BinningCode& code, const SimOptions& options = {});

struct GoodB {
  std::vector<std::uint64_t> b;
  double tv = 0.0;
  double mean_tv = 0.0;  // over every evaluated vector
  std::size_t evaluated = 0;
  bool exhaustive = false;
};

/// Evaluates the all-zero vector plus `candidates` sampled ones (every vector
/// when the space is that small) and returns the best.
GoodB find_good_b(const ProtocolModel& model, const BinningCode& code, int candidates, std::uint64_t seed,
                  const SimOptions& options = {});

enum class MarginClass { interior, boundary, exterior };

const char* to_string(MarginClass c);

struct ConstraintMargin {
  std::string name;
  double slack = 0.0;  // positive means satisfied with room
  bool strict = false;
  MarginClass cls = MarginClass::interior;
};

struct MarginReport {
  std::vector<ConstraintMargin> constraints;
  double r12 = 0.0;
  double r21 = 0.0;
  MarginClass cls = MarginClass::interior;
};

MarginReport rate_margin_report(const DenseJoint& joint, const ProtocolRates& rates, double tol = 1e-9);

}  // namespace coordsim
