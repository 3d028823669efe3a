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

#include "coordsim/prob/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "coordsim/error.hpp"
#include "coordsim/prob/info.hpp"
#include "coordsim/rng.hpp"

namespace coordsim {
namespace {

void require_certificate(double eps) {
  if (!(eps >= 0.0)) throw InvalidArgument("eps must be non-negative");
  if (!(eps < 0.5)) throw PreconditionViolation("total-variation certificate must be below 1/2");
}

std::size_t common_size(const DenseJoint& joint, const NameSet& names, const char* what) {
  std::size_t k = 0;
  for (const auto& n : names) {
    const auto s = joint.axes()[joint.axis_index(n)].alphabet.size();
    if (k != 0 && s != k) throw InvalidArgument(std::string(what) + " coordinates must share one alphabet");
    k = s;
  }
  return k;
}

NameSet prefix(const NameSet& v, std::size_t len) { return NameSet(v.begin(), v.begin() + len); }

}  // namespace

EntropyGap entropy_gap_bound(const DenseJoint& p, const DenseJoint& q) {
  if (p.rank() != 1 || !p.same_axes(q)) throw InvalidArgument("entropy gap needs two pmfs on the same single axis");
  const std::size_t k = p.axes()[0].alphabet.size();
  if (k < 2) throw InvalidArgument("entropy gap needs an alphabet of at least two symbols");
  EntropyGap out;
  out.tv = total_variation(p, q);
  if (!(out.tv < 0.5)) throw PreconditionViolation("entropy gap bound requires total variation below 1/2");
  out.gap = std::abs(entropy_bits(p.mass()) - entropy_bits(q.mass()));
  out.bound = out.tv * std::log2(static_cast<double>(k - 1)) + binary_entropy(out.tv);
  out.holds = out.gap <= out.bound + kBoundSlack;
  return out;
}

Lemma4Check lemma4_check(const DenseJoint& joint, const NameSet& w, const std::string& z, double eps) {
  if (w.empty()) throw InvalidArgument("lemma 4 check needs n >= 1");
  require_certificate(eps);
  const std::size_t wsize = common_size(joint, w, "W");
  NameSet given;
  if (!z.empty()) given.push_back(z);

  Lemma4Check out;
  out.n = static_cast<int>(w.size());
  out.eps = eps;
  for (std::size_t q = 1; q < w.size(); ++q) {
    NameSet past = prefix(w, q);
    past.insert(past.end(), given.begin(), given.end());
    // I(W_q ; W^{q-1} | Z) = H(W_q | Z) - H(W_q | W^{q-1} Z)
    out.lhs += entropy(joint, {w[q]}, given).bits - entropy(joint, {w[q]}, past).bits;
  }
  out.lhs = clamp_information(out.lhs, "lemma 4 sum");
  const double n = out.n;
  const double logw = std::log2(static_cast<double>(wsize));
  const double hb = binary_entropy(eps);
  out.rhs = 2.0 * n * (eps * logw + hb);
  out.rhs_proof = 2.0 * n * eps * logw + (n + 1.0) * hb;
  out.holds = out.lhs <= out.rhs + kBoundSlack;
  return out;
}

Lemma5Check lemma5_check(const DenseJoint& joint, const NameSet& x, const NameSet& y, double eps) {
  if (x.empty() || x.size() != y.size()) throw InvalidArgument("lemma 5 check needs n >= 1 matching X and Y names");
  require_certificate(eps);
  const std::size_t n = x.size();
  common_size(joint, x, "X");
  const std::size_t ysize = common_size(joint, y, "Y");

  // The X block must be i.i.d.: each coordinate matches X_1, and the block
  // factorizes into the product of its coordinates.
  const DenseJoint px = joint.marginal(x);
  const auto p1 = joint.marginal({x[0]});
  const std::size_t xs = p1.cells();
  for (std::size_t q = 1; q < n; ++q) {
    const auto pq = joint.marginal({x[q]});
    for (std::size_t i = 0; i < xs; ++i) {
      if (std::abs(pq.mass()[i] - p1.mass()[i]) > 1e-9) throw PreconditionViolation("X marginal is not identically distributed");
    }
  }
  {
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t cell = 0; cell < px.cells(); ++cell) {
      double prod = 1.0;
      for (auto i : idx) prod *= p1.mass()[i];
      if (std::abs(prod - px.mass()[cell]) > 1e-9) throw PreconditionViolation("X marginal is not a product");
      for (std::size_t a = n; a-- > 0;) {
        if (++idx[a] < xs) break;
        idx[a] = 0;
      }
    }
  }

  Lemma5Check out;
  out.n = static_cast<int>(n);
  out.eps = eps;
  out.bound = 2.0 * (eps * std::log2(static_cast<double>(ysize)) + binary_entropy(eps));
  out.holds = true;
  for (std::size_t q = 0; q < n; ++q) {
    NameSet others;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != q) others.push_back(x[j]);
    }
    double v = 0.0;
    if (!others.empty()) v = mutual_information(joint, others, {y[q]}, {x[q]}).bits;
    out.per_position.push_back(v);
    out.holds = out.holds && v <= out.bound + kBoundSlack;
  }

  // Time-sharing variable: p(q, x, y) = p_{X_q Y_q}(x, y) / n.
  const std::size_t cells = xs * ysize;
  std::vector<double> qxy;
  qxy.reserve(n * cells);
  for (std::size_t q = 0; q < n; ++q) {
    auto m = joint.marginal({x[q], y[q]});
    for (double v : m.mass()) qxy.push_back(v / static_cast<double>(n));
  }
  DenseJoint tq({{"Q", Alphabet(n)}, {"X", Alphabet(xs)}, {"Y", Alphabet(ysize)}}, std::move(qxy));
  out.time_sharing = mutual_information(tq, {"Y"}, {"Q"}, {"X"}).bits;
  out.holds = out.holds && out.time_sharing <= out.bound + kBoundSlack;
  return out;
}

namespace {

// Mass of p(z) prod_q kernel_q(w_q|z), laid out as (W_1..W_n, Z).
std::vector<double> product_mass(const std::vector<double>& pz, const std::vector<std::vector<double>>& kernels,
                                 std::size_t ws) {
  const std::size_t n = kernels.size();
  const std::size_t zs = pz.size();
  std::size_t wcells = 1;
  for (std::size_t i = 0; i < n; ++i) wcells *= ws;
  std::vector<double> mass(wcells * zs, 0.0);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t wc = 0; wc < wcells; ++wc) {
    for (std::size_t zi = 0; zi < zs; ++zi) {
      double v = pz[zi];
      for (std::size_t q = 0; q < n; ++q) v *= kernels[q][zi * ws + idx[q]];
      mass[wc * zs + zi] = v;
    }
    for (std::size_t a = n; a-- > 0;) {
      if (++idx[a] < ws) break;
      idx[a] = 0;
    }
  }
  return mass;
}

}  // namespace

DenseJoint conditional_product(const DenseJoint& joint, const NameSet& w, const std::string& z,
                               const std::vector<std::vector<double>>& kernels) {
  if (kernels.size() != w.size()) throw InvalidArgument("need one kernel per W coordinate");
  const std::size_t ws = common_size(joint, w, "W");
  std::vector<double> pz{1.0};
  std::vector<Axis> axes;
  for (const auto& name : w) axes.push_back(joint.axes()[joint.axis_index(name)]);
  if (!z.empty()) {
    auto zm = joint.marginal({z});
    pz.assign(zm.mass().begin(), zm.mass().end());
    axes.push_back(zm.axes()[0]);
  }
  for (const auto& k : kernels) {
    if (k.size() != pz.size() * ws) throw InvalidArgument("kernel has wrong size");
  }
  return DenseJoint(std::move(axes), product_mass(pz, kernels, ws)).reordered(joint.axis_names());
}

DenseJoint memoryless_reference(const DenseJoint& joint, const NameSet& x, const NameSet& y,
                                const std::vector<double>& kernel) {
  const std::size_t n = x.size();
  const auto p1 = joint.marginal({x[0]});
  const std::size_t xs = p1.cells();
  const std::size_t ys = common_size(joint, y, "Y");
  if (kernel.size() != xs * ys) throw InvalidArgument("kernel has wrong size");
  std::vector<Axis> axes;
  for (const auto& name : x) axes.push_back(joint.axes()[joint.axis_index(name)]);
  for (const auto& name : y) axes.push_back(joint.axes()[joint.axis_index(name)]);
  Shape shape;
  for (const auto& a : axes) shape.dims.push_back(a.alphabet.size());
  std::vector<double> mass(shape.cells());
  std::vector<std::size_t> idx(2 * n, 0);
  for (std::size_t cell = 0; cell < mass.size(); ++cell) {
    double v = 1.0;
    for (std::size_t q = 0; q < n; ++q) v *= p1.mass()[idx[q]] * kernel[idx[q] * ys + idx[n + q]];
    mass[cell] = v;
    for (std::size_t a = 2 * n; a-- > 0;) {
      if (++idx[a] < shape.dims[a]) break;
      idx[a] = 0;
    }
  }
  return DenseJoint(std::move(axes), std::move(mass)).reordered(joint.axis_names());
}

namespace {

// Dirichlet draw that is occasionally sparse, so boundary cases get exercised.
std::vector<double> random_pmf(Rng& rng, std::size_t k) {
  auto v = rng.dirichlet(k, rng.uniform() < 0.3 ? 0.3 : 1.0);
  if (k > 2 && rng.uniform() < 0.2) {
    v[rng.below(k)] = 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    for (auto& x : v) x /= s;
  }
  return v;
}

std::vector<double> mix(const std::vector<double>& a, const std::vector<double>& b, double t) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
  return out;
}

std::vector<double> renormalize(std::vector<double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  for (auto& x : v) x /= s;
  return v;
}

NameSet numbered(const std::string& stem, std::size_t n) {
  NameSet out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

void record(BoundSweepReport& rep, double lhs, double rhs, bool holds, double eps) {
  ++rep.instances;
  if (!holds) ++rep.violations;
  rep.max_excess = std::max(rep.max_excess, lhs - rhs);
  if (eps == 0.0) {
    ++rep.zero_eps_instances;
    rep.max_lhs_at_zero_eps = std::max(rep.max_lhs_at_zero_eps, lhs);
  }
}

}  // namespace

BoundSweepReport sweep_entropy_gap(int instances, std::uint64_t seed) {
  BoundSweepReport rep;
  rep.name = "entropy_gap_bound";
  std::uint64_t attempt = 0;
  for (int i = 0; i < instances; ++i) {
    Rng rng(derive_seed(seed, 11, attempt++));
    const std::size_t k = 2 + rng.below(4);
    std::vector<Axis> ax{{"X", Alphabet(k)}};
    auto p = random_pmf(rng, k);
    std::vector<double> q;
    if (i % 50 == 0) {
      q = p;
    } else {
      // Shrink the mixture weight until the pair is inside the lemma's domain.
      auto r = random_pmf(rng, k);
      double t = rng.uniform();
      for (;;) {
        q = renormalize(mix(p, r, t));
        double tv = 0.0;
        for (std::size_t j = 0; j < k; ++j) tv += 0.5 * std::abs(p[j] - q[j]);
        if (tv < 0.45) break;
        t *= 0.5;
      }
    }
    DenseJoint pj(ax, renormalize(p));
    DenseJoint qj(ax, renormalize(q));
    auto g = entropy_gap_bound(pj, qj);
    record(rep, g.gap, g.bound, g.holds, g.tv);
  }
  return rep;
}

BoundSweepReport sweep_lemma4(int instances, std::uint64_t seed, double corrupt_eps) {
  BoundSweepReport rep;
  rep.name = "lemma4_check";
  std::uint64_t attempt = 0;
  for (int i = 0; i < instances; ++i) {
    Rng rng(derive_seed(seed, 12, attempt++));
    const std::size_t n = 1 + rng.below(3);
    const std::size_t ws = 2 + rng.below(2);
    const std::size_t zs = 1 + rng.below(3);
    const NameSet w = numbered("W", n);
    std::vector<Axis> axes;
    for (const auto& name : w) axes.push_back({name, Alphabet(ws)});
    axes.push_back({"Z", Alphabet(zs)});

    std::vector<std::vector<double>> kernels(n);
    for (auto& k : kernels) {
      for (std::size_t zi = 0; zi < zs; ++zi) {
        auto row = random_pmf(rng, ws);
        k.insert(k.end(), row.begin(), row.end());
      }
    }
    // Start from an exactly conditionally i.i.d. joint with a random p(z).
    std::vector<double> base = product_mass(random_pmf(rng, zs), kernels, ws);
    const std::size_t cells = base.size();

    std::vector<double> mass = base;
    if (i % 25 != 0) {
      auto noise = random_pmf(rng, cells);
      mass = renormalize(mix(base, noise, 0.6 * rng.uniform()));
    }
    DenseJoint joint(axes, mass);
    const double eps = total_variation(joint, conditional_product(joint, w, "Z", kernels));
    if (!(eps < 0.5)) {
      --i;
      continue;
    }
    auto c = lemma4_check(joint, w, "Z", eps * corrupt_eps);
    record(rep, c.lhs, c.rhs, c.holds, eps);
  }
  return rep;
}

BoundSweepReport sweep_lemma5(int instances, std::uint64_t seed, double corrupt_eps) {
  BoundSweepReport rep;
  rep.name = "lemma5_check";
  std::uint64_t attempt = 0;
  for (int i = 0; i < instances; ++i) {
    Rng rng(derive_seed(seed, 13, attempt++));
    const std::size_t n = 1 + rng.below(3);
    const std::size_t xs = 2 + rng.below(2);
    const std::size_t ys = 2 + rng.below(2);
    const NameSet x = numbered("X", n);
    const NameSet y = numbered("Y", n);
    std::vector<Axis> axes;
    for (const auto& name : x) axes.push_back({name, Alphabet(xs)});
    for (const auto& name : y) axes.push_back({name, Alphabet(ys)});

    auto px = random_pmf(rng, xs);
    std::vector<double> kernel;
    for (std::size_t a = 0; a < xs; ++a) {
      auto row = random_pmf(rng, ys);
      kernel.insert(kernel.end(), row.begin(), row.end());
    }
    std::size_t xcells = 1, ycells = 1;
    for (std::size_t q = 0; q < n; ++q) {
      xcells *= xs;
      ycells *= ys;
    }
    // Channel y^n | x^n: memoryless kernel mixed with an arbitrary one.
    const double t = (i % 25 == 0) ? 0.0 : 0.6 * rng.uniform();
    std::vector<double> mass(xcells * ycells);
    std::vector<std::size_t> xi(n, 0);
    for (std::size_t xc = 0; xc < xcells; ++xc) {
      double pxn = 1.0;
      for (auto v : xi) pxn *= px[v];
      auto noise = random_pmf(rng, ycells);
      std::vector<std::size_t> yi(n, 0);
      for (std::size_t yc = 0; yc < ycells; ++yc) {
        double mem = 1.0;
        for (std::size_t q = 0; q < n; ++q) mem *= kernel[xi[q] * ys + yi[q]];
        mass[xc * ycells + yc] = pxn * ((1.0 - t) * mem + t * noise[yc]);
        for (std::size_t a = n; a-- > 0;) {
          if (++yi[a] < ys) break;
          yi[a] = 0;
        }
      }
      for (std::size_t a = n; a-- > 0;) {
        if (++xi[a] < xs) break;
        xi[a] = 0;
      }
    }
    DenseJoint joint(axes, renormalize(mass));
    const double eps = total_variation(joint, memoryless_reference(joint, x, y, kernel));
    if (!(eps < 0.5)) {
      --i;
      continue;
    }
    auto c = lemma5_check(joint, x, y, eps * corrupt_eps);
    double worst = c.time_sharing;
    for (double v : c.per_position) worst = std::max(worst, v);
    record(rep, worst, c.bound, c.holds, eps);
  }
  return rep;
}

}  // namespace coordsim
