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

#include <cmath>
#include <cstring>

#include "coordsim/error.hpp"
#include "coordsim/prob/bounds.hpp"
#include "coordsim/prob/info.hpp"
#include "coordsim/prob/json_io.hpp"
#include "coordsim/rng.hpp"

namespace coordsim {
namespace {

// Reference values evaluated with mpmath at 30 digits.
constexpr double kH025 = 0.811278124459132863909695792039;
constexpr double kHb01 = 0.468995593589281221253589330383;
constexpr double kDsbsMi = 0.531004406410718778746410669617;

Axis bit(const std::string& name) { return {name, Alphabet(2)}; }

DenseJoint random_joint(Rng& rng, std::vector<Axis> axes) {
  Shape s;
  for (const auto& a : axes) s.dims.push_back(a.alphabet.size());
  return DenseJoint(std::move(axes), rng.dirichlet(s.cells(), 0.7));
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(entropy(DenseJoint({bit("X")}, {0.5, 0.5}), {"X"}).bits, 1.0, 1e-15);
  EXPECT_EQ(entropy(DenseJoint({bit("X")}, {0.0, 1.0}), {"X"}).bits, 0.0);
  EXPECT_NEAR(entropy(DenseJoint({bit("X")}, {0.25, 0.75}), {"X"}).bits, kH025, 1e-15);
  EXPECT_EQ(entropy(DenseJoint({bit("X")}, {0.25, 0.75}), {"X"}).kind, InfoKind::entropy);
}

TEST(Entropy, ZeroProbabilityConditioningContributesNothing) {
  // X is uniform when Y = 0; Y = 1 never happens.
  DenseJoint d({bit("X"), bit("Y")}, {0.5, 0.0, 0.5, 0.0});
  auto h = entropy(d, {"X"}, {"Y"});
  EXPECT_NEAR(h.bits, 1.0, 1e-15);
  EXPECT_EQ(h.kind, InfoKind::conditional_entropy);
}

TEST(Entropy, Errors) {
  DenseJoint d({bit("X"), bit("Y")}, {0.25, 0.25, 0.25, 0.25});
  EXPECT_THROW(entropy(d, {"Q"}), InvalidArgument);
  EXPECT_THROW(entropy(d, {}), InvalidArgument);
  EXPECT_THROW(entropy(d, {"X"}, {"X"}), InvalidArgument);
}

TEST(MutualInformation, Examples) {
  DenseJoint indep({bit("X"), bit("Y")}, {0.06, 0.14, 0.24, 0.56});
  EXPECT_NEAR(mutual_information(indep, {"X"}, {"Y"}).bits, 0.0, 1e-12);
  DenseJoint copy({bit("X"), bit("Y")}, {0.5, 0.0, 0.0, 0.5});
  EXPECT_NEAR(mutual_information(copy, {"X"}, {"Y"}).bits, 1.0, 1e-15);
  DenseJoint dsbs({bit("X"), bit("Y")}, {0.45, 0.05, 0.05, 0.45});
  EXPECT_NEAR(mutual_information(dsbs, {"X"}, {"Y"}).bits, kDsbsMi, 1e-12);
  EXPECT_THROW(mutual_information(dsbs, {"X"}, {"X"}), InvalidArgument);
  EXPECT_THROW(mutual_information(dsbs, {"X"}, {"Z"}), InvalidArgument);
}

TEST(TotalVariation, Examples) {
  DenseJoint p({bit("X")}, {1.0, 0.0});
  DenseJoint q({bit("X")}, {0.5, 0.5});
  DenseJoint r({bit("X")}, {0.0, 1.0});
  EXPECT_EQ(total_variation(p, p), 0.0);
  EXPECT_EQ(total_variation(p, r), 1.0);
  EXPECT_DOUBLE_EQ(total_variation(p, q), 0.5);
  DenseJoint other({bit("Y")}, {0.5, 0.5});
  EXPECT_THROW(total_variation(p, other), InvalidArgument);
}

TEST(BinaryEntropy, Examples) {
  EXPECT_EQ(binary_entropy(0.5), 1.0);
  EXPECT_EQ(binary_entropy(0.0), 0.0);
  EXPECT_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.1), kHb01, 1e-15);
  EXPECT_THROW(binary_entropy(-0.1), InvalidArgument);
  EXPECT_THROW(binary_entropy(1.5), InvalidArgument);
}

TEST(Markov, Examples) {
  Rng rng(7);
  // Z is a copy of Y.
  {
    auto pxy = rng.dirichlet(4);
    std::vector<double> m(8, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) m[x * 4 + y * 2 + y] = pxy[x * 2 + y];
    DenseJoint d({bit("X"), bit("Y"), bit("Z")}, m);
    auto t = is_markov(d, {"X"}, {"Y"}, {"Z"}, 1e-12);
    EXPECT_TRUE(t.holds);
    EXPECT_NEAR(t.slack, 0.0, 1e-12);
  }
  // X = Z uniform, B independent.
  {
    std::vector<double> m(8, 0.0);
    for (int x = 0; x < 2; ++x)
      for (int b = 0; b < 2; ++b) m[x * 4 + b * 2 + x] = 0.25;
    DenseJoint d({bit("X"), bit("B"), bit("Z")}, m);
    auto t = is_markov(d, {"X"}, {"B"}, {"Z"}, 1e-6);
    EXPECT_FALSE(t.holds);
    EXPECT_NEAR(t.slack, 1.0, 1e-12);
  }
  // p(x) p(y|x) p(z|y) on ternary alphabets.
  {
    auto px = rng.dirichlet(3);
    std::vector<std::vector<double>> pyx, pzy;
    for (int i = 0; i < 3; ++i) {
      pyx.push_back(rng.dirichlet(3));
      pzy.push_back(rng.dirichlet(3));
    }
    std::vector<double> m;
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y)
        for (int z = 0; z < 3; ++z) m.push_back(px[x] * pyx[x][y] * pzy[y][z]);
    Axis t3x{"X", Alphabet(3)}, t3y{"Y", Alphabet(3)}, t3z{"Z", Alphabet(3)};
    DenseJoint d({t3x, t3y, t3z}, m);
    EXPECT_TRUE(is_markov(d, {"X"}, {"Y"}, {"Z"}, 1e-9).holds);
  }
  DenseJoint d({bit("X"), bit("Y")}, {0.25, 0.25, 0.25, 0.25});
  EXPECT_THROW(is_markov(d, {"X"}, {"X"}, {"Y"}, 1e-9), InvalidArgument);
}

TEST(DenseJoint, RejectsInvalidTensors) {
  EXPECT_THROW(DenseJoint({bit("X")}, {0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(DenseJoint({bit("X")}, {1.5, -0.5}), InvalidArgument);
  EXPECT_THROW(DenseJoint({bit("X"), bit("X")}, {0.25, 0.25, 0.25, 0.25}), InvalidArgument);
  EXPECT_THROW(DenseJoint({bit("X")}, {1.0}), InvalidArgument);
  EXPECT_THROW(Alphabet(std::vector<std::string>{"a", "a"}), InvalidArgument);
  EXPECT_THROW(Alphabet(0), InvalidArgument);
}

TEST(DenseJoint, JsonRoundTripIsBitExact) {
  Rng rng(3);
  auto d = random_joint(rng, {{"X1", Alphabet(std::vector<std::string>{"a", "b", "c"})}, bit("Y")});
  const std::string text = to_json(d).dump();
  auto back = dense_joint_from_json(nlohmann::json::parse(text));
  ASSERT_TRUE(back.same_axes(d));
  for (std::size_t i = 0; i < d.cells(); ++i) {
    EXPECT_EQ(std::memcmp(&d.mass()[i], &back.mass()[i], sizeof(double)), 0);
  }
  // 17 significant digit literals survive unchanged.
  auto lit = nlohmann::json::parse(
      R"({"axes":[{"name":"X","symbols":["0","1"]}],"mass":[0.12345678901234567,0.87654321098765433]})");
  auto parsed = dense_joint_from_json(lit);
  EXPECT_EQ(to_json(parsed)["mass"][0].get<double>(), 0.12345678901234567);
  EXPECT_EQ(to_json(parsed)["mass"][1].get<double>(), 0.87654321098765433);
  EXPECT_THROW(dense_joint_from_json(nlohmann::json::parse(R"({"axes":[]})")), ParseError);
}

// ---------------------------------------------------------------------------
// Properties on random joints.

TEST(Properties, TotalVariationCalculus) {
  // ||pX pY|X - qX pY|X|| = ||pX - qX|| and ||pX - qX|| <= ||pX pY|X - qX qY|X||.
  for (int trial = 0; trial < 200; ++trial) {
    Rng rng(derive_seed(1, 1, trial));
    const std::size_t xs = 2 + rng.below(3), ys = 2 + rng.below(3);
    auto px = rng.dirichlet(xs), qx = rng.dirichlet(xs);
    std::vector<std::vector<double>> pyx, qyx;
    for (std::size_t i = 0; i < xs; ++i) {
      pyx.push_back(rng.dirichlet(ys));
      qyx.push_back(rng.dirichlet(ys));
    }
    std::vector<double> a, b, c;
    for (std::size_t x = 0; x < xs; ++x)
      for (std::size_t y = 0; y < ys; ++y) {
        a.push_back(px[x] * pyx[x][y]);
        b.push_back(qx[x] * pyx[x][y]);
        c.push_back(qx[x] * qyx[x][y]);
      }
    std::vector<Axis> axes{{"X", Alphabet(xs)}, {"Y", Alphabet(ys)}};
    DenseJoint A(axes, a), B(axes, b), C(axes, c);
    DenseJoint PX({axes[0]}, px), QX({axes[0]}, qx);
    const double marg = total_variation(PX, QX);
    EXPECT_NEAR(total_variation(A, B), marg, 1e-12);
    EXPECT_LE(marg, total_variation(A, C) + 1e-12);
    EXPECT_GE(total_variation(A, C), 0.0);
    EXPECT_LE(total_variation(A, C), 1.0);
  }
}

TEST(Properties, ChainRuleNonNegativityAndMarginals) {
  for (int trial = 0; trial < 200; ++trial) {
    Rng rng(derive_seed(1, 2, trial));
    auto d = random_joint(rng, {{"A", Alphabet(2 + rng.below(2))},
                                {"B", Alphabet(2 + rng.below(2))},
                                {"C", Alphabet(2 + rng.below(2))}});
    const double lhs = entropy(d, {"A", "B"}, {"C"}).bits;
    const double rhs = entropy(d, {"A"}, {"C"}).bits + entropy(d, {"B"}, {"A", "C"}).bits;
    EXPECT_NEAR(lhs, rhs, 1e-10);
    EXPECT_GE(mutual_information(d, {"A"}, {"B"}, {"C"}).bits, -1e-9);
    EXPECT_GE(mutual_information(d, {"A"}, {"C"}).bits, -1e-9);
    EXPECT_NEAR(entropy(d.marginal({"B", "A"}), {"A", "B"}).bits, entropy(d, {"A", "B"}).bits, 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Bound checkers.

TEST(EntropyGap, Examples) {
  DenseJoint p({{"X", Alphabet(4)}}, {0.1, 0.2, 0.3, 0.4});
  auto same = entropy_gap_bound(p, p);
  EXPECT_EQ(same.gap, 0.0);
  EXPECT_EQ(same.bound, 0.0);
  EXPECT_TRUE(same.holds);

  DenseJoint a({bit("X")}, {0.3, 0.7}), b({bit("X")}, {0.5, 0.5});
  auto g = entropy_gap_bound(a, b);
  EXPECT_NEAR(g.bound, binary_entropy(g.tv), 1e-15);  // log2(1) = 0
  EXPECT_TRUE(g.holds);

  DenseJoint c({bit("X")}, {1.0, 0.0}), e({bit("X")}, {0.5, 0.5});
  EXPECT_THROW(entropy_gap_bound(c, e), PreconditionViolation);  // tv == 1/2 exactly
  DenseJoint single({{"X", Alphabet(1)}}, {1.0});
  EXPECT_THROW(entropy_gap_bound(single, single), InvalidArgument);
}

TEST(EntropyGap, RandomPairsOnFiveSymbols) {
  int checked = 0;
  for (int trial = 0; checked < 1000; ++trial) {
    Rng rng(derive_seed(2, 0, trial));
    auto p = rng.dirichlet(5, 0.5);
    auto r = rng.dirichlet(5, 0.5);
    const double t = rng.uniform();
    std::vector<double> q(5);
    for (int i = 0; i < 5; ++i) q[i] = (1 - t) * p[i] + t * r[i];
    DenseJoint P({{"X", Alphabet(5)}}, p), Q({{"X", Alphabet(5)}}, q);
    if (total_variation(P, Q) >= 0.4) continue;
    ++checked;
    auto g = entropy_gap_bound(P, Q);
    ASSERT_TRUE(g.holds) << "gap " << g.gap << " bound " << g.bound;
  }
}

TEST(ChainBound, ConditionallyIidHasZeroLhs) {
  Rng rng(11);
  std::vector<std::vector<double>> kernels;
  for (int q = 0; q < 3; ++q) {
    std::vector<double> k;
    for (int z = 0; z < 2; ++z) {
      auto row = rng.dirichlet(2);
      k.insert(k.end(), row.begin(), row.end());
    }
    kernels.push_back(k);
  }
  DenseJoint shape({bit("W1"), bit("W2"), bit("W3"), bit("Z")}, std::vector<double>(16, 1.0 / 16));
  auto joint = conditional_product(shape, {"W1", "W2", "W3"}, "Z", kernels);
  auto c = lemma4_check(joint, {"W1", "W2", "W3"}, "Z", 0.0);
  EXPECT_NEAR(c.lhs, 0.0, 1e-12);
  EXPECT_EQ(c.rhs, 0.0);
  EXPECT_TRUE(c.holds);
}

TEST(ChainBound, PerturbedBinaryPair) {
  Rng rng(12);
  std::vector<std::vector<double>> kernels;
  for (int q = 0; q < 2; ++q) {
    std::vector<double> k;
    for (int z = 0; z < 2; ++z) {
      auto row = rng.dirichlet(2);
      k.insert(k.end(), row.begin(), row.end());
    }
    kernels.push_back(k);
  }
  DenseJoint flat({bit("W1"), bit("W2"), bit("Z")}, std::vector<double>(8, 0.125));
  auto base = conditional_product(flat, {"W1", "W2"}, "Z", kernels);
  auto noise = rng.dirichlet(8);
  std::vector<double> m(8);
  for (int i = 0; i < 8; ++i) m[i] = 0.8 * base.mass()[i] + 0.2 * noise[i];
  DenseJoint joint(base.axes(), m);
  const double eps = total_variation(joint, conditional_product(joint, {"W1", "W2"}, "Z", kernels));
  ASSERT_GT(eps, 0.0);
  ASSERT_LT(eps, 0.5);
  auto c = lemma4_check(joint, {"W1", "W2"}, "Z", eps);
  EXPECT_GT(c.lhs, 0.0);
  EXPECT_TRUE(c.holds);
  EXPECT_LE(c.rhs_proof, c.rhs + 1e-15);
  EXPECT_THROW(lemma4_check(joint, {"W1", "W2"}, "Z", 0.5), PreconditionViolation);
  EXPECT_THROW(lemma4_check(joint, {}, "Z", 0.1), InvalidArgument);
}

TEST(ChainBound, TernaryTripleSweep) {
  // n = 3, |W| = 3, 500 random perturbations with measured certificates.
  for (int trial = 0; trial < 500; ++trial) {
    Rng rng(derive_seed(4, 0, trial));
    std::vector<Axis> axes{{"W1", Alphabet(3)}, {"W2", Alphabet(3)}, {"W3", Alphabet(3)}, bit("Z")};
    std::vector<std::vector<double>> kernels(3);
    for (auto& k : kernels)
      for (int z = 0; z < 2; ++z) {
        auto row = rng.dirichlet(3);
        k.insert(k.end(), row.begin(), row.end());
      }
    DenseJoint flat(axes, std::vector<double>(54, 1.0 / 54));
    auto base = conditional_product(flat, {"W1", "W2", "W3"}, "Z", kernels);
    auto noise = rng.dirichlet(54, 0.5);
    const double t = 0.5 * rng.uniform();
    std::vector<double> m(54);
    for (int i = 0; i < 54; ++i) m[i] = (1 - t) * base.mass()[i] + t * noise[i];
    DenseJoint joint(axes, m);
    const double eps = total_variation(joint, conditional_product(joint, {"W1", "W2", "W3"}, "Z", kernels));
    if (eps >= 0.5) continue;
    auto c = lemma4_check(joint, {"W1", "W2", "W3"}, "Z", eps);
    ASSERT_TRUE(c.holds) << "trial " << trial << " lhs " << c.lhs << " rhs " << c.rhs;
  }
}

TEST(SingleLetterBound, MemorylessChannelHasZeroLhs) {
  Rng rng(21);
  auto px = rng.dirichlet(2);
  std::vector<double> kernel;
  for (int x = 0; x < 2; ++x) {
    auto row = rng.dirichlet(3);
    kernel.insert(kernel.end(), row.begin(), row.end());
  }
  std::vector<Axis> axes{bit("X1"), bit("X2"), {"Y1", Alphabet(3)}, {"Y2", Alphabet(3)}};
  // Seed joint with the right X marginal; the reference only reads p(x).
  std::vector<double> seed(36);
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int y = 0; y < 9; ++y) seed[(x1 * 2 + x2) * 9 + y] = px[x1] * px[x2] / 9.0;
  auto joint = memoryless_reference(DenseJoint(axes, seed), {"X1", "X2"}, {"Y1", "Y2"}, kernel);
  auto c = lemma5_check(joint, {"X1", "X2"}, {"Y1", "Y2"}, 0.0);
  for (double v : c.per_position) EXPECT_NEAR(v, 0.0, 1e-12);
  EXPECT_NEAR(c.time_sharing, 0.0, 1e-12);
  EXPECT_TRUE(c.holds);
}

TEST(SingleLetterBound, RejectsNonIidInputs) {
  DenseJoint joint({bit("X1"), bit("X2"), bit("Y1"), bit("Y2")}, {0.25, 0, 0, 0, 0, 0.25, 0, 0, 0, 0, 0.25, 0,
                                                                   0, 0, 0, 0.25});
  // X1 = X2 always: identically distributed but not independent.
  DenseJoint correlated({bit("X1"), bit("X2"), bit("Y1"), bit("Y2")},
                        {0.25, 0.25, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0.25, 0.25});
  EXPECT_THROW(lemma5_check(correlated, {"X1", "X2"}, {"Y1", "Y2"}, 0.1), PreconditionViolation);
  EXPECT_NO_THROW(lemma5_check(joint, {"X1", "X2"}, {"Y1", "Y2"}, 0.1));
}

TEST(SingleLetterBound, PerturbedBinaryPairAndSweep) {
  auto rep2 = sweep_lemma5(100, 5);
  EXPECT_EQ(rep2.violations, 0);
  int n3 = 0;
  for (int trial = 0; n3 < 500; ++trial) {
    Rng rng(derive_seed(6, 0, trial));
    auto px = rng.dirichlet(2);
    std::vector<double> kernel;
    for (int x = 0; x < 2; ++x) {
      auto row = rng.dirichlet(2);
      kernel.insert(kernel.end(), row.begin(), row.end());
    }
    std::vector<Axis> axes{bit("X1"), bit("X2"), bit("X3"), bit("Y1"), bit("Y2"), bit("Y3")};
    const double t = 0.6 * rng.uniform();
    std::vector<double> m(64);
    for (int xc = 0; xc < 8; ++xc) {
      const int xs[3] = {xc >> 2 & 1, xc >> 1 & 1, xc & 1};
      const double pxn = px[xs[0]] * px[xs[1]] * px[xs[2]];
      auto noise = rng.dirichlet(8);
      for (int yc = 0; yc < 8; ++yc) {
        const int ys[3] = {yc >> 2 & 1, yc >> 1 & 1, yc & 1};
        double mem = 1.0;
        for (int q = 0; q < 3; ++q) mem *= kernel[xs[q] * 2 + ys[q]];
        m[xc * 8 + yc] = pxn * ((1 - t) * mem + t * noise[yc]);
      }
    }
    DenseJoint joint(axes, m);
    const NameSet x{"X1", "X2", "X3"}, y{"Y1", "Y2", "Y3"};
    const double eps = total_variation(joint, memoryless_reference(joint, x, y, kernel));
    if (eps >= 0.5) continue;
    ++n3;
    auto c = lemma5_check(joint, x, y, eps);
    ASSERT_TRUE(c.holds) << "trial " << trial;
  }
}

TEST(BoundSweeps, HonestSweepsPassAndCorruptedCertificatesFail) {
  EXPECT_EQ(sweep_entropy_gap(300, 1).violations, 0);
  EXPECT_EQ(sweep_lemma4(300, 1).violations, 0);
  EXPECT_EQ(sweep_lemma5(300, 1).violations, 0);
  auto zero = sweep_lemma4(300, 1);
  EXPECT_GT(zero.zero_eps_instances, 0);
  EXPECT_EQ(zero.max_lhs_at_zero_eps, 0.0);
  EXPECT_GT(sweep_lemma4(300, 1, 0.0).violations, 0);
}

}  // namespace
}  // namespace coordsim
