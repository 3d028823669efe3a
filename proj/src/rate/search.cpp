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


#include "coordsim/rate/search.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "coordsim/error.hpp"
#include "coordsim/rng.hpp"

namespace coordsim {

namespace {

constexpr double kLn2 = 0.693147180559945309417;
constexpr double kLogFloor = 1e-15;
constexpr std::size_t kMaxCells = std::size_t{1} << 22;
constexpr double kFixedPenalty = 10.0;

// ---------------------------------------------------------------------------
// Rate LP over one scheme.

// 0/1 coefficients of (R0, R12, R21) in the four region inequalities.
constexpr std::array<std::array<int, 3>, 4> kRows{{{0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, 1, 1}}};

bool solve_small(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i) {
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    }
    if (std::abs(a[piv][c]) < 1e-12) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const double f = a[i][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[i][k] -= f * a[c][k];
      b[i] -= f * b[c];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

// Vertex enumeration; constraints with every variable fixed are either
// infeasible (penalty < 0) or charged `penalty` per bit of violation.
double lp_value(const std::array<double, 4>& rhs, const RateObjective& obj, const FixedRates& fixed,
                double penalty, RatePoint* out) {
  const std::array<std::optional<double>, 3> fx{fixed.r0, fixed.r12, fixed.r21};
  const std::array<double, 3> c{obj.r0, obj.r12, obj.r21};
  std::vector<int> free;
  for (int k = 0; k < 3; ++k) {
    if (!fx[k]) free.push_back(k);
  }
  double extra = 0.0;
  // Each row: coefficients on free vars and the reduced right side.
  std::vector<std::vector<double>> rows;
  std::vector<double> rr;
  for (int i = 0; i < 4; ++i) {
    double b = rhs[i];
    std::vector<double> row;
    bool any = false;
    for (int k = 0; k < 3; ++k) {
      if (fx[k]) {
        b -= kRows[i][k] * *fx[k];
      }
    }
    for (int k : free) {
      row.push_back(kRows[i][k]);
      any = any || kRows[i][k] != 0;
    }
    if (!any) {
      if (b > kMembershipSlack) {
        if (penalty < 0.0) return std::numeric_limits<double>::infinity();
        extra += penalty * b;
      }
      continue;
    }
    rows.push_back(std::move(row));
    rr.push_back(b);
  }
  for (std::size_t j = 0; j < free.size(); ++j) {
    std::vector<double> row(free.size(), 0.0);
    row[j] = 1.0;
    rows.push_back(std::move(row));
    rr.push_back(0.0);
  }
  double base = extra;
  for (int k = 0; k < 3; ++k) {
    if (fx[k]) base += c[k] * *fx[k];
  }
  const std::size_t n = free.size();
  std::array<double, 3> best_x{};
  double best = std::numeric_limits<double>::infinity();
  if (n == 0) {
    best = 0.0;
  } else {
    const std::size_t m = rows.size();
    std::vector<std::size_t> pick(n);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
      if (depth == n) {
        std::vector<std::vector<double>> a;
        std::vector<double> b, x;
        for (auto p : pick) {
          a.push_back(rows[p]);
          b.push_back(rr[p]);
        }
        if (!solve_small(a, b, x)) return;
        for (std::size_t i = 0; i < m; ++i) {
          double lhs = 0.0;
          for (std::size_t k = 0; k < n; ++k) lhs += rows[i][k] * x[k];
          if (lhs < rr[i] - 1e-12) return;
        }
        double v = 0.0;
        for (std::size_t k = 0; k < n; ++k) v += c[free[k]] * x[k];
        if (v < best) {
          best = v;
          for (std::size_t k = 0; k < n; ++k) best_x[free[k]] = std::max(0.0, x[k]);
        }
        return;
      }
      for (std::size_t i = start; i < m; ++i) {
        pick[depth] = i;
        rec(i + 1, depth + 1);
      }
    };
    rec(0, 0);
  }
  if (out) {
    out->r0 = fx[0] ? *fx[0] : best_x[0];
    out->r12 = fx[1] ? *fx[1] : best_x[1];
    out->r21 = fx[2] ? *fx[2] : best_x[2];
  }
  return base + best;
}

// ---------------------------------------------------------------------------
// Dense model of the factorized joint over (F1..Fr, X1, X2, Y1, Y2).

using Params = std::vector<std::vector<double>>;

struct Block {
  std::size_t var_size = 0;
  std::size_t rows = 0;
  std::vector<std::uint32_t> off;  // per cell
};

struct Marg {
  std::vector<std::uint32_t> map;  // per cell
  std::size_t size = 0;
};

enum Term { kFX2, kFX1, kFX, kF1X, kF1XY, kFXY, kXY, kX, kX1, kX2, kTerms };

struct Values {
  std::array<double, kTerms> h{};
  std::array<double, 4> rhs{};
  double i_f1_y = 0.0, i_f_y = 0.0;
  double divergence = 0.0;  // D(target || P_XY)
  double tv = 0.0;
  std::array<std::vector<double>, kTerms> m;
};

class Model {
 public:
  Model(const ChannelSpec& channel, std::vector<std::size_t> f_sizes) : sizes_(std::move(f_sizes)) {
    r_ = static_cast<int>(sizes_.size());
    dims_ = sizes_;
    dims_.push_back(channel.x1().size());
    dims_.push_back(channel.x2().size());
    dims_.push_back(channel.y1().size());
    dims_.push_back(channel.y2().size());
    cells_ = 1;
    for (auto d : dims_) {
      cells_ *= d;
      if (cells_ > kMaxCells) throw BudgetExceeded("scheme joint is too large to search");
    }
    const auto target = channel.target();
    target_.assign(target.mass().begin(), target.mass().end());

    const std::size_t rank = dims_.size();
    const std::size_t ix1 = r_, ix2 = r_ + 1;
    blocks_.resize(r_ + 2);
    for (int j = 0; j < r_ + 2; ++j) {
      blocks_[j].var_size = j < r_ ? sizes_[j] : dims_[r_ + 2 + (j - r_)];
      blocks_[j].off.resize(cells_);
    }
    // Axis lists for each block: given axes then var axis.
    std::vector<std::vector<std::size_t>> axes(r_ + 2);
    for (int j = 0; j < r_; ++j) {
      for (int k = 0; k < j; ++k) axes[j].push_back(k);
      axes[j].push_back(j % 2 == 0 ? ix1 : ix2);
      axes[j].push_back(j);
    }
    for (int o = 0; o < 2; ++o) {
      auto& a = axes[r_ + o];
      for (int k = 0; k < r_; ++k) a.push_back(k);
      a.push_back(o == 0 ? ix1 : ix2);
      a.push_back(r_ + 2 + o);
    }
    for (int j = 0; j < r_ + 2; ++j) {
      std::size_t n = 1;
      for (auto a : axes[j]) n *= dims_[a];
      blocks_[j].rows = n / blocks_[j].var_size;
    }

    std::array<std::vector<std::size_t>, kTerms> keep;
    std::vector<std::size_t> fs, x{ix1, ix2}, y{ix1 + 2, ix2 + 2};
    for (int k = 0; k < r_; ++k) fs.push_back(k);
    auto cat = [](std::initializer_list<std::vector<std::size_t>> parts) {
      std::vector<std::size_t> o;
      for (const auto& p : parts) o.insert(o.end(), p.begin(), p.end());
      return o;
    };
    keep[kFX2] = cat({fs, {ix2}});
    keep[kFX1] = cat({fs, {ix1}});
    keep[kFX] = cat({fs, x});
    keep[kF1X] = cat({{0}, x});
    keep[kF1XY] = cat({{0}, x, y});
    keep[kFXY] = cat({fs, x, y});
    keep[kXY] = cat({x, y});
    keep[kX] = x;
    keep[kX1] = {ix1};
    keep[kX2] = {ix2};
    for (int t = 0; t < kTerms; ++t) {
      marg_[t].map.resize(cells_);
      marg_[t].size = 1;
      for (auto a : keep[t]) marg_[t].size *= dims_[a];
    }

    qx_.resize(cells_);
    std::vector<std::size_t> idx(rank, 0);
    for (std::size_t cell = 0; cell < cells_; ++cell) {
      qx_[cell] = channel.q_x().mass()[idx[ix1] * dims_[ix2] + idx[ix2]];
      for (int j = 0; j < r_ + 2; ++j) {
        std::size_t o = 0;
        for (auto a : axes[j]) o = o * dims_[a] + idx[a];
        blocks_[j].off[cell] = static_cast<std::uint32_t>(o);
      }
      for (int t = 0; t < kTerms; ++t) {
        std::size_t o = 0;
        for (auto a : keep[t]) o = o * dims_[a] + idx[a];
        marg_[t].map[cell] = static_cast<std::uint32_t>(o);
      }
      for (std::size_t a = rank; a-- > 0;) {
        if (++idx[a] < dims_[a]) break;
        idx[a] = 0;
      }
    }
  }

  int r() const { return r_; }
  std::size_t cells() const { return cells_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }

  void joint(const Params& th, std::vector<double>& p) const {
    p.assign(qx_.begin(), qx_.end());
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      const auto& off = blocks_[j].off;
      const auto& t = th[j];
      for (std::size_t c = 0; c < cells_; ++c) p[c] *= t[off[c]];
    }
  }

  void evaluate(const std::vector<double>& p, Values& v) const {
    for (int t = 0; t < kTerms; ++t) {
      auto& m = v.m[t];
      m.assign(marg_[t].size, 0.0);
      const auto& map = marg_[t].map;
      for (std::size_t c = 0; c < cells_; ++c) m[map[c]] += p[c];
      v.h[t] = entropy_bits(m);
    }
    const auto& h = v.h;
    const double a = h[kFX2] + h[kX] - h[kX2] - h[kFX];
    const double b = h[kFX1] + h[kX] - h[kX1] - h[kFX];
    v.i_f1_y = h[kF1X] + h[kXY] - h[kX] - h[kF1XY];
    v.i_f_y = h[kFX] + h[kXY] - h[kX] - h[kFXY];
    v.rhs = {a, b, a + v.i_f1_y, a + b + v.i_f_y};
    double d = 0.0, tv = 0.0;
    const auto& m = v.m[kXY];
    for (std::size_t i = 0; i < m.size(); ++i) {
      tv += std::abs(m[i] - target_[i]);
      if (target_[i] > 0.0) d += target_[i] * std::log2(target_[i] / std::max(m[i], kLogFloor));
    }
    v.divergence = d;
    v.tv = std::min(1.0, 0.5 * tv);
  }

  // d(merit)/dP(cell) for RHS weights w and penalty rho.
  void cell_gradient(const Values& v, const std::array<double, 4>& w, double rho, std::vector<double>& g) const {
    const double c1 = w[0] + w[2] + w[3], c2 = w[1] + w[3], ci1 = w[2], ci = w[3];
    std::array<double, kTerms> coef{};
    coef[kFX2] = c1;
    coef[kFX1] = c2;
    coef[kFX] = ci - c1 - c2;
    coef[kF1X] = ci1;
    coef[kF1XY] = -ci1;
    coef[kFXY] = -ci;
    coef[kXY] = ci1 + ci;
    g.assign(cells_, 0.0);
    for (int t = 0; t < kTerms; ++t) {
      if (coef[t] == 0.0 && t != kXY) continue;
      std::vector<double> lg(v.m[t].size());
      for (std::size_t i = 0; i < lg.size(); ++i) {
        lg[i] = -coef[t] * std::log2(std::max(v.m[t][i], kLogFloor));
        if (t == kXY && target_[i] > 0.0) lg[i] -= rho * target_[i] / std::max(v.m[t][i], kLogFloor) / kLn2;
      }
      const auto& map = marg_[t].map;
      for (std::size_t c = 0; c < cells_; ++c) g[c] += lg[map[c]];
    }
  }

  // Gradient of the merit with respect to block j entries, each row scaled by
  // the inverse of its context mass.
  void block_gradient(const Params& th, std::size_t j, const std::vector<double>& g, std::vector<double>& out) const {
    const auto& blk = blocks_[j];
    out.assign(th[j].size(), 0.0);
    std::vector<double> ctx(blk.rows, 0.0);
    std::vector<double> q(qx_);
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      if (i == j) continue;
      const auto& off = blocks_[i].off;
      for (std::size_t c = 0; c < cells_; ++c) q[c] *= th[i][off[c]];
    }
    for (std::size_t c = 0; c < cells_; ++c) {
      const auto o = blk.off[c];
      out[o] += g[c] * q[c];
      ctx[o / blk.var_size] += q[c] * th[j][o];
    }
    for (std::size_t row = 0; row < blk.rows; ++row) {
      const double s = 1.0 / (ctx[row] + 1e-9);
      for (std::size_t k = 0; k < blk.var_size; ++k) out[row * blk.var_size + k] *= s;
    }
  }

  // One EM step toward the target marginal.
  void em_step(Params& th, const std::vector<double>& p, const Values& v) const {
    const auto& m = v.m[kXY];
    const auto& map = marg_[kXY].map;
    std::vector<double> ps(cells_);
    for (std::size_t c = 0; c < cells_; ++c) {
      const double mm = m[map[c]];
      ps[c] = mm > 0.0 ? p[c] * target_[map[c]] / mm : 0.0;
    }
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
      const auto& blk = blocks_[j];
      std::vector<double> acc(th[j].size(), 0.0);
      for (std::size_t c = 0; c < cells_; ++c) acc[blk.off[c]] += ps[c];
      for (std::size_t row = 0; row < blk.rows; ++row) {
        double s = 0.0;
        for (std::size_t k = 0; k < blk.var_size; ++k) s += acc[row * blk.var_size + k];
        if (s <= 0.0) continue;
        for (std::size_t k = 0; k < blk.var_size; ++k) th[j][row * blk.var_size + k] = acc[row * blk.var_size + k] / s;
      }
    }
  }

  AuxScheme to_scheme(const ChannelSpec& channel, const Params& th) const {
    auto s = blank_scheme(channel, sizes_);
    for (int i = 0; i < r_; ++i) s.rounds[i].table = th[i];
    s.out1.table = th[r_];
    s.out2.table = th[r_ + 1];
    // Renormalize rows so the scheme passes exact row-sum checks.
    auto fix = [](ConditionalTable& t) {
      for (std::size_t row = 0; row < t.rows(); ++row) {
        double sum = 0.0;
        for (std::size_t k = 0; k < t.var_size; ++k) sum += t.table[row * t.var_size + k];
        for (std::size_t k = 0; k < t.var_size; ++k) t.table[row * t.var_size + k] /= sum;
      }
    };
    for (auto& t : s.rounds) fix(t);
    fix(s.out1);
    fix(s.out2);
    return s;
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> dims_;
  int r_ = 0;
  std::size_t cells_ = 0;
  std::vector<double> qx_;
  std::vector<double> target_;
  std::vector<Block> blocks_;
  std::array<Marg, kTerms> marg_;
};

// Euclidean projection onto the probability simplex.
void project_simplex(double* v, std::size_t n) {
  std::vector<double> u(v, v + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = std::max(0.0, v[i] - theta);
}

// ---------------------------------------------------------------------------
// Restart driver shared by membership and min-rate searches.

struct Merit {
  // Value of the rate part and its gradient with respect to the RHS vector.
  std::function<double(const std::array<double, 4>&)> value;
};

std::array<double, 4> merit_weights(const Merit& merit, const std::array<double, 4>& rhs) {
  constexpr double h = 1e-6;
  const double f0 = merit.value(rhs);
  std::array<double, 4> w{};
  for (int k = 0; k < 4; ++k) {
    auto x = rhs;
    x[k] += h;
    w[k] = (merit.value(x) - f0) / h;
  }
  return w;
}

struct RestartResult {
  Params theta;
  Values values;
  double merit = std::numeric_limits<double>::infinity();
};

Params random_params(const Model& model, Rng& rng) {
  const double alphas[] = {0.2, 0.5, 1.0};
  const double alpha = alphas[rng.below(3)];
  Params th;
  for (const auto& blk : model.blocks()) {
    std::vector<double> t;
    for (std::size_t row = 0; row < blk.rows; ++row) {
      auto d = rng.dirichlet(blk.var_size, alpha);
      t.insert(t.end(), d.begin(), d.end());
    }
    th.push_back(std::move(t));
  }
  return th;
}

// Stick-breaking grid over every free table entry; returns the best points.
std::vector<Params> grid_seeds(const Model& model, const Merit& merit, std::size_t budget, std::size_t keep) {
  std::size_t d = 0;
  for (const auto& blk : model.blocks()) d += blk.rows * (blk.var_size - 1);
  if (keep == 0) return {};
  std::size_t levels = 1;
  if (d == 0) {
    levels = 1;
  } else {
    levels = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(budget), 1.0 / static_cast<double>(d)) + 1e-9));
    if (levels < 2) return {};
  }
  std::vector<std::size_t> digit(d, 0);
  Params th;
  for (const auto& blk : model.blocks()) th.emplace_back(blk.rows * blk.var_size, 0.0);
  std::vector<std::pair<double, Params>> best;
  std::vector<double> p;
  Values v;
  for (;;) {
    std::size_t pos = 0;
    for (std::size_t j = 0; j < th.size(); ++j) {
      const auto& blk = model.blocks()[j];
      for (std::size_t row = 0; row < blk.rows; ++row) {
        double rest = 1.0;
        for (std::size_t k = 0; k + 1 < blk.var_size; ++k) {
          const double u = static_cast<double>(digit[pos++]) / static_cast<double>(levels - 1);
          th[j][row * blk.var_size + k] = rest * u;
          rest -= rest * u;
        }
        th[j][row * blk.var_size + blk.var_size - 1] = rest;
      }
    }
    model.joint(th, p);
    model.evaluate(p, v);
    const double f = merit.value(v.rhs) + 10.0 * v.divergence;
    if (std::isfinite(f)) {
      if (best.size() < keep || f < best.back().first) {
        best.emplace_back(f, th);
        std::stable_sort(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        if (best.size() > keep) best.pop_back();
      }
    }
    std::size_t a = 0;
    for (; a < d; ++a) {
      if (++digit[a] < levels) break;
      digit[a] = 0;
    }
    if (a == d) break;
  }
  std::vector<Params> out;
  for (auto& b : best) out.push_back(std::move(b.second));
  return out;
}

RestartResult run_restart(const Model& model, const Merit& merit, Params th, const SearchConfig& config) {
  std::vector<double> p, g, bg;
  Values v;
  auto total = [&](const Params& t, double rho, Values& out) {
    model.joint(t, p);
    model.evaluate(p, out);
    return merit.value(out.rhs) + rho * out.divergence;
  };

  const double rhos[] = {0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0};
  const int stages = static_cast<int>(std::size(rhos));
  const int per_stage = std::max(1, config.iterations / stages);
  std::vector<double> step(th.size(), 0.05);
  for (double rho : rhos) {
    for (int it = 0; it < per_stage; ++it) {
      bool moved = false;
      for (std::size_t j = 0; j < th.size(); ++j) {
        const auto& blk = model.blocks()[j];
        if (blk.var_size == 1) continue;
        const double f0 = total(th, rho, v);
        model.cell_gradient(v, merit_weights(merit, v.rhs), rho, g);
        model.block_gradient(th, j, g, bg);
        Params trial = th;
        Values tv;
        bool ok = false;
        for (int bt = 0; bt < 30; ++bt) {
          for (std::size_t i = 0; i < bg.size(); ++i) trial[j][i] = th[j][i] - step[j] * bg[i];
          for (std::size_t row = 0; row < blk.rows; ++row) project_simplex(&trial[j][row * blk.var_size], blk.var_size);
          if (total(trial, rho, tv) < f0 - 1e-13) {
            ok = true;
            break;
          }
          step[j] *= 0.5;
        }
        if (ok) {
          th[j] = std::move(trial[j]);
          step[j] = std::min(step[j] * 1.5, 10.0);
          moved = true;
        } else {
          step[j] = 0.05;
        }
      }
      if (!moved) break;
    }
  }

  // Feasibility polish.
  for (int it = 0; it < config.polish_iterations; ++it) {
    model.joint(th, p);
    model.evaluate(p, v);
    if (v.tv <= 0.05 * config.witness_tol) break;
    model.em_step(th, p, v);
  }
  RestartResult res;
  res.merit = total(th, 0.0, res.values);
  res.theta = std::move(th);
  return res;
}

std::vector<RestartResult> run_search(const Model& model, const Merit& merit, const SearchConfig& config) {
  if (config.restarts < 1 || config.iterations < 0 || config.polish_iterations < 0 || config.workers < 1) {
    throw InvalidArgument("search needs restarts >= 1, workers >= 1 and non-negative budgets");
  }
  const std::size_t restarts = static_cast<std::size_t>(config.restarts);
  auto seeds = grid_seeds(model, merit, config.grid_points, restarts / 2);
  std::vector<RestartResult> out(restarts);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < restarts; i = next++) {
      Params init;
      if (i < seeds.size()) {
        init = seeds[i];
      } else {
        Rng rng(derive_seed(config.seed, 21, i));
        init = random_params(model, rng);
      }
      out[i] = run_restart(model, merit, std::move(init), config);
    }
  };
  const int n = std::min<int>(config.workers, config.restarts);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

RegionEval eval_of(const Values& v) {
  RegionEval e;
  for (int k = 0; k < 4; ++k) e.rhs[k] = std::max(0.0, v.rhs[k]);
  e.i_f1_y = std::max(0.0, v.i_f1_y);
  e.i_f_y = std::max(0.0, v.i_f_y);
  return e;
}

// Independent check of a candidate through the public evaluation path.
std::optional<Witness> confirm(const ChannelSpec& channel, const Model& model, const RestartResult& res, int index,
                               const SearchConfig& config) {
  if (!(res.values.tv <= config.witness_tol)) return std::nullopt;
  Witness w;
  w.scheme = model.to_scheme(channel, res.theta);
  const auto joint = assemble_joint(channel, w.scheme);
  TrOptions opt;
  opt.tol = config.witness_tol;
  opt.preset = config.preset;
  opt.enforce_cardinality = !config.override_cardinality;
  const auto rep = validate_T_r(channel, joint, opt);
  if (!rep.pass) return std::nullopt;
  w.eval = theorem1_eval(joint);
  w.marginal_tv = rep.marginal_tv;
  w.restart = index;
  return w;
}

}  // namespace

std::vector<std::size_t> search_sizes(const ChannelSpec& channel, int r, const SearchConfig& config) {
  if (r < 1) throw InvalidArgument("round count must be at least 1");
  if (!config.f_sizes.empty()) {
    if (config.f_sizes.size() != static_cast<std::size_t>(r)) throw InvalidArgument("f_sizes must list one size per round");
    std::vector<std::size_t> earlier;
    for (auto s : config.f_sizes) {
      if (s == 0) throw InvalidArgument("auxiliary alphabet must be non-empty");
      if (!config.override_cardinality && s > cardinality_bound(channel, earlier, config.preset)) {
        throw InvalidArgument("auxiliary alphabet exceeds the cardinality bound");
      }
      earlier.push_back(s);
    }
    return config.f_sizes;
  }
  if (config.max_alphabet == 0) throw InvalidArgument("max_alphabet must be positive");
  std::vector<std::size_t> sizes;
  for (int i = 0; i < r; ++i) sizes.push_back(std::min(config.max_alphabet, cardinality_bound(channel, sizes, config.preset)));
  return sizes;
}

double scheme_min_rate(const RegionEval& eval, const RateObjective& objective, const FixedRates& fixed,
                       RatePoint* point) {
  return lp_value(eval.rhs, objective, fixed, -1.0, point);
}

SearchOutcome search_membership(const ChannelSpec& channel, const RatePoint& point, int r,
                                const SearchConfig& config) {
  make_rate_point(point.r0, point.r12, point.r21);
  const Model model(channel, search_sizes(channel, r, config));
  const std::array<double, 4> lhs{point.r12, point.r21, point.r0 + point.r12, point.r0 + point.r12 + point.r21};
  constexpr double tau = 0.02;
  Merit merit{[lhs](const std::array<double, 4>& rhs) {
    double mx = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 4; ++k) mx = std::max(mx, rhs[k] - lhs[k]);
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += std::exp((rhs[k] - lhs[k] - mx) / tau);
    return mx + tau * std::log(s);
  }};
  const auto results = run_search(model, merit, config);

  SearchOutcome out;
  out.restarts_run = static_cast<int>(results.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& res = results[i];
    if (res.values.tv <= config.witness_tol) {
      const auto m = membership(point, eval_of(res.values));
      double deficit = 0.0;
      for (double s : m.slack) deficit = std::max(deficit, -s);
      out.best_violation = std::min(out.best_violation, deficit);
    }
    if (!(res.merit < best)) continue;
    auto w = confirm(channel, model, res, static_cast<int>(i), config);
    if (!w || !membership(point, w->eval).member) continue;
    best = res.merit;
    out.witness = std::move(w);
  }
  return out;
}

MinRateResult min_rate(const ChannelSpec& channel, int r, const RateObjective& objective, const FixedRates& fixed,
                       const SearchConfig& config) {
  for (double c : {objective.r0, objective.r12, objective.r21}) {
    if (!std::isfinite(c) || c < 0.0) throw InvalidArgument("objective weights must be non-negative");
  }
  for (const auto& f : {fixed.r0, fixed.r12, fixed.r21}) {
    if (f && !(std::isfinite(*f) && *f >= 0.0)) throw InvalidArgument("fixed rates must be non-negative");
  }
  const double free_weight = (fixed.r0 ? 0.0 : objective.r0) + (fixed.r12 ? 0.0 : objective.r12) +
                             (fixed.r21 ? 0.0 : objective.r21);
  if (!(free_weight > 0.0)) throw InvalidArgument("objective must weight at least one free rate");

  const Model model(channel, search_sizes(channel, r, config));
  Merit merit{[objective, fixed](const std::array<double, 4>& rhs) {
    return lp_value(rhs, objective, fixed, kFixedPenalty, nullptr);
  }};
  const auto results = run_search(model, merit, config);

  MinRateResult out;
  out.restarts_run = static_cast<int>(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& res = results[i];
    if (res.values.tv > config.witness_tol) continue;
    RatePoint pt;
    const double v = lp_value(eval_of(res.values).rhs, objective, fixed, -1.0, &pt);
    if (!(v < out.value)) continue;
    auto w = confirm(channel, model, res, static_cast<int>(i), config);
    if (!w) continue;
    out.value = scheme_min_rate(w->eval, objective, fixed, &out.point);
    out.witness = std::move(w);
  }
  return out;
}

}  // namespace coordsim
