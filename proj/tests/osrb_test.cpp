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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "channels.hpp"
#include "coordsim/error.hpp"
#include "coordsim/osrb/code.hpp"
#include "coordsim/osrb/model.hpp"
#include "coordsim/osrb/protocol.hpp"
#include "coordsim/prob/info.hpp"

namespace coordsim {
namespace {

using testing::bsc;
using testing::dsbs_copy;
using testing::f1_is_y2;
using testing::noisy_chain;

constexpr double kHb01 = 0.468995593589281221253589330383;

AuxScheme with_constant_round(const ChannelSpec& c, const AuxScheme& s) {
  auto t = blank_scheme(c, {s.f_sizes[0], 1});
  t.rounds[0] = s.rounds[0];
  t.rounds[0].given = {"X1"};
  for (auto& v : t.rounds[1].table) v = 1.0;
  t.out1.table = s.out1.table;
  t.out2.table = s.out2.table;
  return t;
}

// X1 uniform, Y2 ~ Bern(0.3) independent of it; F constant.
std::pair<ChannelSpec, AuxScheme> product_target() {
  ChannelSpec c(testing::uniform_x1_only(), Alphabet(1), Alphabet(2), {0.7, 0.3, 0.7, 0.3});
  auto s = blank_scheme(c, {1});
  for (auto& v : s.rounds[0].table) v = 1.0;
  for (auto& v : s.out1.table) v = 1.0;
  s.out2.table = {0.7, 0.3};
  return {c, s};
}

TEST(BinningCode, BinCounts) {
  EXPECT_EQ(bin_count(0.0, 10), 1u);
  EXPECT_EQ(bin_count(1.0, 1), 2u);
  EXPECT_EQ(bin_count(0.5, 3), 3u);
  EXPECT_EQ(bin_count(1.0, 62), std::uint64_t{1} << 62);
  EXPECT_THROW(bin_count(1.0, 63), InvalidArgument);
  EXPECT_THROW(bin_count(-0.1, 4), InvalidArgument);
  EXPECT_THROW(bin_count(std::nan(""), 4), InvalidArgument);
  EXPECT_THROW(make_protocol_rates(0, {1}, {}), InvalidArgument);
}

TEST(BinningCode, ZeroRateIsSingleBin) {
  BinningCode code(6, {2}, make_protocol_rates(0, {0}, {0}), 5);
  for (std::uint64_t c = 0; c < 64; ++c) {
    const std::vector<Sequence> f{sequence_of(c, 2, 6)};
    EXPECT_EQ(code.omega(f), 0u);
    EXPECT_EQ(code.b(1, f), 0u);
    EXPECT_EQ(code.k(1, f), 0u);
  }
}

TEST(BinningCode, RangeAndDeterminism) {
  BinningCode a(1, {2}, make_protocol_rates(0, {1}, {0}), 9), b(1, {2}, make_protocol_rates(0, {1}, {0}), 9);
  EXPECT_EQ(a.k_bins(1), 2u);
  for (std::uint8_t v = 0; v < 2; ++v) {
    const std::vector<Sequence> f{{v}};
    EXPECT_LT(a.k(1, f), 2u);
    EXPECT_EQ(a.k(1, f), b.k(1, f));
  }
  EXPECT_NEAR(BinningCode(3, {2}, make_protocol_rates(0, {0.5}, {0}), 1).nominal_rate(3), std::log2(3.0) / 3, 1e-15);
}

TEST(BinningCode, SeedsAndMapsLookIndependent) {
  const auto rates = make_protocol_rates(0, {4.0 / 20}, {4.0 / 20});
  BinningCode a(20, {2}, rates, 1), b(20, {2}, rates, 2);
  ASSERT_EQ(a.k_bins(1), 16u);
  int same_seed = 0, same_map = 0;
  for (std::uint64_t c = 0; c < 10000; ++c) {
    const std::vector<Sequence> f{sequence_of(c * 97, 2, 20)};
    same_seed += a.k(1, f) == b.k(1, f);
    same_map += a.k(1, f) == a.b(1, f);
  }
  // 1/16 with a binomial standard deviation of 0.0024.
  EXPECT_NEAR(same_seed / 1e4, 1.0 / 16, 0.01);
  EXPECT_NEAR(same_map / 1e4, 1.0 / 16, 0.01);
}

TEST(BinningCode, ChiSquareUniform) {
  BinningCode code(16, {2}, make_protocol_rates(0, {6.0 / 16}, {0}), 77);
  ASSERT_EQ(code.k_bins(1), 64u);
  std::vector<double> count(64, 0.0);
  for (std::uint64_t c = 0; c < 65536; ++c) count[code.k(1, std::vector<Sequence>{sequence_of(c, 2, 16)})] += 1;
  double chi2 = 0.0;
  for (double v : count) chi2 += (v - 1024) * (v - 1024) / 1024;
  // 63 degrees of freedom; 0.999 quantile is 103.4.
  EXPECT_LT(chi2, 103.4);
}

TEST(BinningCode, LaterRoundsHashWholePrefix) {
  BinningCode code(8, {2, 2}, make_protocol_rates(0, {0.5, 0.5}, {0, 0.5}), 3);
  int differ = 0;
  for (std::uint64_t c = 0; c < 256; ++c) {
    const std::vector<Sequence> x{sequence_of(c, 2, 8), sequence_of(0, 2, 8)};
    const std::vector<Sequence> y{sequence_of((c + 1) % 256, 2, 8), sequence_of(0, 2, 8)};
    differ += code.k(2, x) != code.k(2, y);
  }
  EXPECT_GT(differ, 200);
  EXPECT_THROW(code.k(2, std::vector<Sequence>{sequence_of(0, 2, 8)}), InvalidArgument);
}

TEST(SwDecode, ConstantAlwaysDecodes) {
  auto [c, s] = product_target();
  ProtocolModel m(c, s);
  BinningCode code(5, {1}, make_protocol_rates(0.4, {0.4}, {0.4}), 1);
  const auto d = sw_decode(m, code, 1, {1, 1, 1}, {}, Sequence(5, 0), {});
  EXPECT_EQ(d.status, DecodeStatus::ok);
  EXPECT_EQ(d.sequence, Sequence(5, 0));
  Rng rng(1);
  const auto e = sw_decode_ensemble(m, code, 1, Sequence(5, 0), false, {}, Sequence(5, 0), {}, rng);
  EXPECT_EQ(e.status, DecodeStatus::ok);
}

TEST(SwDecode, MatchesBruteForce) {
  auto [c, s] = dsbs_copy(0.2);
  ProtocolModel m(c, s);
  const int n = 4;
  BinningCode code(n, {2}, make_protocol_rates(0.5, {0.5}, {0.25}), 13);
  TypicalityParams tp{0.3};
  int unique = 0, checked = 0;
  for (std::uint64_t xc = 0; xc < 16; ++xc) {
    const auto x2 = sequence_of(xc, 2, n);
    for (std::uint64_t fc = 0; fc < 16; ++fc) {
      const std::vector<Sequence> f{sequence_of(fc, 2, n)};
      const BinObservation obs{code.omega(f), code.b(1, f), code.k(1, f)};
      // Independent enumeration of the typical candidates.
      std::vector<std::uint64_t> typical;
      for (std::uint64_t g = 0; g < 16; ++g) {
        const std::vector<Sequence> cand{sequence_of(g, 2, n)};
        if (code.omega(cand) != obs.omega || code.b(1, cand) != obs.b || code.k(1, cand) != obs.k) continue;
        double ll = 0.0;
        for (int t = 0; t < n; ++t) ll -= std::log2(cand[0][t] == x2[t] ? 0.8 : 0.2);
        if (std::abs(ll / n - binary_entropy(0.2)) <= tp.delta) typical.push_back(g);
      }
      const auto d = sw_decode(m, code, 1, obs, {}, x2, tp);
      ++checked;
      if (typical.size() == 1) {
        ++unique;
        EXPECT_EQ(d.status, DecodeStatus::ok);
        EXPECT_EQ(sequence_code(d.sequence, 2), typical[0]);
      } else if (typical.empty()) {
        EXPECT_EQ(d.status, DecodeStatus::empty);
      } else {
        EXPECT_EQ(d.status, DecodeStatus::ambiguous);
        EXPECT_EQ(sequence_code(d.sequence, 2), typical[0]);
      }
    }
  }
  EXPECT_GT(unique, 50);
  EXPECT_EQ(checked, 256);
  EXPECT_THROW(sw_decode(m, code, 1, {4, 0, 0}, {}, Sequence(n, 0), tp), InvalidArgument);
  EXPECT_THROW(sw_decode(m, code, 1, {0, 0, 0}, {}, Sequence(n, 0), TypicalityParams{0}), InvalidArgument);
}

TEST(SwDecode, TypicalCountMatchesEnumeration) {
  auto [c, s] = dsbs_copy(0.2);
  ProtocolModel m(c, s);
  const int n = 10;
  const Sequence x2{0, 1, 1, 0, 0, 0, 1, 0, 1, 1};
  const auto ctx = m.contexts(1, 2, {}, x2);
  const TypicalityParams tp{0.2};
  int count = 0;
  for (std::uint64_t g = 0; g < 1024; ++g) count += m.typical(1, ctx, sequence_of(g, 2, n), tp);
  EXPECT_NEAR(std::exp2(log2_typical_count(m, 1, ctx, tp)), count, 1e-6 * count);
}

TEST(SwDecode, ZeroRateUninformativeSideFails) {
  auto [c, s] = dsbs_copy(0.5);
  ProtocolModel m(c, s);
  BinningCode code(50, {2}, make_protocol_rates(0, {0}, {0}), 1);
  const auto res = simulate_mc(m, code, 400, 3);
  EXPECT_GT(res.sw_error_rate[0], 0.9);
}

TEST(SwDecode, ErrorFallsWithBinRate) {
  auto [c, s] = dsbs_copy(0.2);
  ProtocolModel m(c, s);
  SimOptions o;
  o.typicality.delta = 0.1;
  const int trials = 2000;
  std::vector<double> err;
  for (double total = 0.62; total < 0.95; total += 0.05) {
    BinningCode code(200, {2}, make_protocol_rates(total / 3, {total / 3}, {total / 3}), 4);
    err.push_back(simulate_mc(m, code, trials, 8, o).sw_error_rate[0]);
  }
  EXPECT_GT(err.front(), 0.9);
  EXPECT_LT(err.back(), 0.1);
  for (std::size_t j = 1; j < err.size(); ++j) {
    const double se = std::sqrt((err[j] * (1 - err[j]) + err[j - 1] * (1 - err[j - 1])) / trials);
    EXPECT_LE(err[j], err[j - 1] + 1.96 * se) << j;
  }
}

TEST(Protocol, ConstantRoundOutputs) {
  auto [c, s] = product_target();
  ProtocolModel m(c, s);
  BinningCode code(3, {1}, make_protocol_rates(0, {0}, {0}), 1);
  Rng rng(4);
  const auto tr = run_protocol_b(m, code, {0, 1, 1}, {0, 0, 0}, 0, {0}, rng);
  EXPECT_EQ(tr.rounds.size(), 1u);
  EXPECT_FALSE(tr.rounds[0].error());
  EXPECT_EQ(tr.y2.size(), 3u);
  const auto res = exact_induced_pmf(m, code);
  EXPECT_NEAR(res.tv_to_target, 0.0, 1e-12);
  EXPECT_NEAR(res.total_mass, 1.0, 1e-12);
  EXPECT_THROW(run_protocol_b(m, code, {0, 1}, {0, 0, 0}, 0, {0}, rng), InvalidArgument);
  EXPECT_THROW(run_protocol_b(m, code, {0, 1, 1}, {0, 0, 0}, 1, {0}, rng), InvalidArgument);
}

TEST(Protocol, CopyTarget) {
  const auto c = bsc(0.0);
  const auto s = f1_is_y2(c);
  ProtocolModel m(c, s);
  SimOptions keep;
  keep.keep_traces = true;
  // 1.2 bits at n = 50 is 2^60 bins, inside the 2^62 limit.
  BinningCode good(50, {2}, make_protocol_rates(0, {1.2}, {0}), 1);
  auto res = simulate_mc(m, good, 200, 2, keep);
  int match = 0;
  for (const auto& t : res.traces) match += t.y2 == t.x1;
  EXPECT_GT(match, 180);

  BinningCode none(50, {2}, make_protocol_rates(0, {0}, {0}), 1);
  res = simulate_mc(m, none, 200, 2, keep);
  match = 0;
  double agree = 0.0;
  for (const auto& t : res.traces) {
    match += t.y2 == t.x1;
    for (int p = 0; p < 50; ++p) agree += t.y2[p] == t.x1[p];
  }
  EXPECT_EQ(match, 0);
  EXPECT_NEAR(agree / (200 * 50), 0.5, 0.05);
}

TEST(Protocol, ExactAgreesWithMonteCarlo) {
  auto [c, s] = noisy_chain(0.3, 0.05);
  ProtocolModel m(c, s);
  const int n = 3;
  BinningCode code(n, {2}, make_protocol_rates(0.4, {0.7}, {0.3}), 21);
  SimOptions o;
  o.keep_pmf = true;
  o.keep_traces = true;
  const auto ex = exact_induced_pmf(m, code, std::nullopt, InducedMode::b, o);
  ASSERT_EQ(ex.induced.size(), 64u);
  const int trials = 20000;
  const auto mc = simulate_mc(m, code, trials, 5, o);
  const double e = ex.sw_error_rate[0];
  EXPECT_NEAR(mc.sw_error_rate[0], e, 4 * std::sqrt(e * (1 - e) / trials) + 1e-9);
  std::vector<double> freq(64, 0.0);
  for (const auto& t : mc.traces) freq[sequence_code(t.x1, 2) * 8 + sequence_code(t.y2, 2)] += 1.0 / trials;
  double tv = 0.0;
  for (int j = 0; j < 64; ++j) tv += 0.5 * std::abs(freq[j] - ex.induced[j]);
  EXPECT_LT(tv, 0.05);
}

TEST(Protocol, ProbabilityConservation) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    auto c = bsc(0.2);
    Rng rng(seed);
    const auto s = random_scheme(c, {2, 2}, rng);
    ProtocolModel m(c, s);
    BinningCode code(3, {2, 2}, make_protocol_rates(0.3, {0.6, 0.4}, {0.2, 0.3}), seed);
    for (auto mode : {InducedMode::a, InducedMode::b}) {
      const auto res = exact_induced_pmf(m, code, std::nullopt, mode);
      EXPECT_NEAR(res.total_mass, 1.0, 1e-9);
      EXPECT_GE(res.tv_to_target, 0.0);
      EXPECT_LE(res.tv_to_target, 1.0);
      for (double e : res.sw_error_rate) {
        EXPECT_GE(e, 0.0);
        EXPECT_LE(e, 1.0);
      }
    }
    const auto fixed = exact_induced_pmf(m, code, std::vector<std::uint64_t>{1, 0});
    EXPECT_NEAR(fixed.total_mass, 1.0, 1e-9);
  }
}

TEST(Protocol, TwoSidedRounds) {
  // Both outputs live, so both views stay in the output tensor.
  const auto c = testing::and_channel();
  const auto s = testing::full_exchange(c, [](int a, int b) { return a & b; });
  ProtocolModel m(c, s);
  BinningCode full(2, {2, 2}, make_protocol_rates(0, {1.5, 1.5}, {0, 0}), 3);
  EXPECT_LT(exact_induced_pmf(m, full).tv_to_target, 0.4);
  BinningCode none(2, {2, 2}, make_protocol_rates(0, {0, 0}, {0, 0}), 3);
  EXPECT_GT(exact_induced_pmf(m, none).tv_to_target, 0.3);
}

TEST(Protocol, DegenerateRoundChangesNothing) {
  auto [c, s] = noisy_chain(0.3, 0.05);
  const auto s2 = with_constant_round(c, s);
  ProtocolModel m1(c, s), m2(c, s2);
  BinningCode c1(4, {2}, make_protocol_rates(0.4, {0.7}, {0.3}), 8);
  BinningCode c2(4, {2, 1}, make_protocol_rates(0.4, {0.7, 0.5}, {0.3, 0.5}), 8);
  SimOptions o;
  o.keep_pmf = true;
  for (auto mode : {InducedMode::a, InducedMode::b}) {
    const auto a = exact_induced_pmf(m1, c1, std::nullopt, mode, o);
    const auto b = exact_induced_pmf(m2, c2, std::nullopt, mode, o);
    ASSERT_EQ(a.induced.size(), b.induced.size());
    double diff = 0.0;
    for (std::size_t j = 0; j < a.induced.size(); ++j) diff = std::max(diff, std::abs(a.induced[j] - b.induced[j]));
    EXPECT_LE(diff, 1e-12);
    EXPECT_EQ(b.sw_error_rate[1], 0.0);
  }
}

TEST(Protocol, DeterministicAcrossWorkers) {
  auto [c, s] = noisy_chain(0.3, 0.05);
  ProtocolModel m(c, s);
  BinningCode code(8, {2}, make_protocol_rates(0.4, {1.0}, {0}), 2);
  SimOptions one, four;
  four.workers = 4;
  const auto a = exact_induced_pmf(m, code, std::nullopt, InducedMode::b, one);
  const auto b = exact_induced_pmf(m, code, std::nullopt, InducedMode::b, four);
  EXPECT_EQ(a.tv_to_target, b.tv_to_target);
  EXPECT_EQ(a.sw_error_rate, b.sw_error_rate);
  EXPECT_EQ(a.empirical.median, b.empirical.median);
  EXPECT_EQ(a.k_entropy, b.k_entropy);
  const auto x = simulate_mc(m, code, 300, 9, one), y = simulate_mc(m, code, 300, 9, four);
  EXPECT_EQ(x.sw_error_rate, y.sw_error_rate);
  EXPECT_EQ(x.empirical.mean, y.empirical.mean);
}

TEST(Protocol, InteriorPointConverges) {
  auto [c, s] = noisy_chain(0.3, 0.05);
  ProtocolModel m(c, s);
  std::vector<double> tv;
  for (int n : {2, 4, 8}) tv.push_back(exact_induced_pmf(m, make_code(s, make_protocol_rates(0.4, {1.0}, {0}), n, 7)).tv_to_target);
  EXPECT_GT(tv[1], tv[2]);
  EXPECT_LT(tv[2], 0.2);
}

TEST(Protocol, ModeGap) {
  auto [c, s] = product_target();
  ProtocolModel m(c, s);
  EXPECT_NEAR(exact_mode_gap(m, BinningCode(4, {1}, make_protocol_rates(0.5, {0.5}, {0.5}), 1)), 0.0, 1e-12);
  auto [c2, s2] = noisy_chain(0.3, 0.05);
  ProtocolModel m2(c2, s2);
  const double gap = exact_mode_gap(m2, BinningCode(6, {2}, make_protocol_rates(0.4, {1.0}, {0}), 1));
  EXPECT_GT(gap, 0.0);
  EXPECT_LT(gap, 1.0);
}

TEST(Protocol, BudgetGuard) {
  auto [c, s] = noisy_chain(0.3, 0.05);
  ProtocolModel m(c, s);
  SimOptions o;
  o.budget = 1e3;
  EXPECT_THROW(exact_induced_pmf(m, BinningCode(8, {2}, make_protocol_rates(0, {1}, {0}), 1), std::nullopt,
                                 InducedMode::b, o),
               BudgetExceeded);
  EXPECT_THROW(exact_induced_pmf(m, BinningCode(30, {2}, make_protocol_rates(0, {1}, {0}), 1)), BudgetExceeded);
  EXPECT_THROW(exact_induced_pmf(m, BinningCode(3, {2}, make_protocol_rates(0, {1}, {1}), 1),
                                 std::vector<std::uint64_t>{0}, InducedMode::a),
               InvalidArgument);
}

TEST(FindGoodB, ExhaustiveOnTinySpace) {
  auto [c, s] = noisy_chain(0.3, 0.05);
  ProtocolModel m(c, s);
  BinningCode code(2, {2}, make_protocol_rates(0.2, {1.0}, {1.0}), 6);
  ASSERT_EQ(code.b_bins(1), 4u);
  const auto g = find_good_b(m, code, 10, 1);
  EXPECT_TRUE(g.exhaustive);
  EXPECT_EQ(g.evaluated, 4u);
  double best = 1.0, mean = 0.0;
  for (std::uint64_t b = 0; b < 4; ++b) {
    const double tv = exact_induced_pmf(m, code, std::vector<std::uint64_t>{b}).tv_to_target;
    best = std::min(best, tv);
    mean += tv / 4;
  }
  EXPECT_EQ(g.tv, best);
  EXPECT_NEAR(g.mean_tv, mean, 1e-12);
}

TEST(FindGoodB, MinNotAboveMean) {
  auto [c, s] = noisy_chain(0.3, 0.05);
  ProtocolModel m(c, s);
  BinningCode code(8, {2}, make_protocol_rates(0.6, {1.0}, {0.1}), 6);
  const auto g = find_good_b(m, code, 6, 3);
  EXPECT_TRUE(g.exhaustive);
  EXPECT_LE(g.tv, g.mean_tv);
  const double avg = exact_induced_pmf(m, code).tv_to_target;
  EXPECT_LE(g.tv, 2 * avg);
}

TEST(Empirical, StatsOfTargetSamples) {
  auto [c, s] = noisy_chain(0.3, 0.05);
  ProtocolModel m(c, s);
  const double p = 0.3 * 0.95 + 0.7 * 0.05;
  std::vector<Trace> iid, constant;
  Rng rng(10);
  for (int k = 0; k < 200; ++k) {
    Trace t, u;
    for (int j = 0; j < 100; ++j) {
      const auto x = static_cast<std::uint8_t>(rng.below(2));
      t.x1.push_back(x);
      t.y2.push_back(static_cast<std::uint8_t>(rng.uniform() < p ? 1 - x : x));
      u.x1.push_back(x);
      u.y2.push_back(0);
    }
    t.x2 = t.y1 = u.x2 = u.y1 = Sequence(100, 0);
    iid.push_back(t);
    constant.push_back(u);
  }
  EXPECT_LT(empirical_coordination_stats(m, iid).median, 0.15);
  // Constant Y2: the product q(x) 1[y=0] is 0.5 away from the target.
  EXPECT_GT(empirical_coordination_stats(m, constant).q10, 0.5 - 0.1);

  Trace one;
  one.x1 = {1};
  one.x2 = one.y1 = one.y2 = {0};
  // Point mass at (1, 0) against cells (0.34, 0.16, 0.16, 0.34).
  EXPECT_NEAR(empirical_tv(m, one), 0.5 * (0.34 + 0.16 + (1 - 0.16) + 0.34), 1e-12);
  EXPECT_THROW(empirical_coordination_stats(m, {}), InvalidArgument);
}

TEST(Empirical, ExactRunsRespectStrongBound) {
  auto [c, s] = noisy_chain(0.3, 0.05);
  ProtocolModel m(c, s);
  for (int n : {4, 8}) {
    const auto res = exact_induced_pmf(m, make_code(s, make_protocol_rates(0.4, {1.0}, {0}), n, 7));
    EXPECT_LE(res.empirical.median, res.tv_to_target + 3 / std::sqrt(n));
    EXPECT_NEAR(res.empirical.weight, 1.0, 1e-9);
  }
}

TEST(Margins, BscOneWay) {
  const auto c = bsc(0.1);
  ProtocolModel m(c, f1_is_y2(c));
  const auto rep = rate_margin_report(m.joint(), make_protocol_rates(2, {0.7}, {0.4}));
  ASSERT_EQ(rep.constraints.size(), 3u);
  EXPECT_EQ(rep.constraints[0].name, "c1");
  EXPECT_NEAR(rep.constraints[0].slack, 2.1, 1e-12);
  EXPECT_EQ(rep.constraints[1].name, "c3V1");
  EXPECT_NEAR(rep.constraints[1].slack, kHb01 - 2.4, 1e-12);
  EXPECT_EQ(rep.constraints[1].cls, MarginClass::exterior);
  EXPECT_EQ(rep.cls, MarginClass::exterior);
  EXPECT_NEAR(rep.r12, 0.7, 0);

  const auto moved = rate_margin_report(m.joint(), make_protocol_rates(2, {0.7 + 0.01}, {0.4}));
  EXPECT_NEAR(moved.constraints[0].slack - rep.constraints[0].slack, 0.01, 1e-12);
  EXPECT_NEAR(moved.constraints[1].slack, rep.constraints[1].slack, 1e-12);
}

TEST(Margins, ZeroRatesConstantScheme) {
  auto [c, s] = product_target();
  ProtocolModel m(c, s);
  const auto rep = rate_margin_report(m.joint(), make_protocol_rates(0, {0}, {0}));
  for (const auto& k : rep.constraints) EXPECT_GE(k.slack, -1e-12) << k.name;
  EXPECT_EQ(rep.cls, MarginClass::boundary);
}

TEST(Margins, TwoRounds) {
  const auto c = testing::and_channel();
  const auto s = testing::full_exchange(c, [](int a, int b) { return a & b; });
  ProtocolModel m(c, s);
  const auto rep = rate_margin_report(m.joint(), make_protocol_rates(0, {1.1, 1.1}, {0, 0}));
  std::set<std::string> names;
  for (const auto& k : rep.constraints) names.insert(k.name);
  EXPECT_EQ(names, (std::set<std::string>{"c1", "c3V1", "c2[2]", "c3V2[2]", "c44[1]", "c44[2]"}));
  EXPECT_NEAR(rep.r12, 1.1, 1e-15);
  EXPECT_NEAR(rep.r21, 1.1, 1e-15);
  EXPECT_THROW(rate_margin_report(m.joint(), make_protocol_rates(0, {1}, {0})), InvalidArgument);
}

}  // namespace
}  // namespace coordsim
