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


#include "coordsim/fme/lp.hpp"

#include <cmath>

#include "coordsim/error.hpp"

namespace coordsim {

Rational ScalarTraits<Rational>::from_double(double v) {
  if (!std::isfinite(v)) throw InvalidArgument("cannot rationalize a non-finite value");
  const double scaled = std::round(v * 1e12);
  if (std::abs(scaled) > 9e18) throw InvalidArgument("value too large for exact mode");
  return Rational(static_cast<long long>(scaled)) / Rational(1000000000000LL);
}

namespace {

template <class T>
T tolerance() {
  if constexpr (std::is_same_v<T, double>) {
    return ScalarTraits<double>::eps;
  } else {
    return T(0);
  }
}

template <class T>
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1)), basis_(rows) {}

  T& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
  T& rhs(std::size_t i) { return at(i, n_); }
  T& obj(std::size_t j) { return at(m_, j); }
  std::size_t& basis(std::size_t i) { return basis_[i]; }

  void pivot(std::size_t r, std::size_t c) {
    const T p = at(r, c);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const T f = at(i, c);
      if (f == T(0)) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
    }
    basis_[r] = c;
  }

  // Bland's rule over columns [0, limit). Returns false when unbounded.
  bool optimize(std::size_t limit) {
    const T eps = tolerance<T>();
    for (;;) {
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j) {
        if (obj(j) < -eps) {
          enter = j;
          break;
        }
      }
      if (enter == limit) return true;
      std::size_t leave = m_;
      T best{};
      for (std::size_t i = 0; i < m_; ++i) {
        if (at(i, enter) > eps) {
          const T ratio = rhs(i) / at(i, enter);
          if (leave == m_ || ratio < best || (ratio == best && basis_[i] < basis_[leave])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

 private:
  std::size_t m_, n_;
  std::vector<T> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace

template <class T>
LpResult<T> lp_minimize(const std::vector<std::vector<T>>& a, const std::vector<T>& b, const std::vector<T>& c,
                        const std::vector<bool>& nonneg) {
  const std::size_t m = b.size(), n = c.size();
  if (a.size() != m || nonneg.size() != n) throw InvalidArgument("LP dimensions do not match");
  const T eps = tolerance<T>();

  // Columns: structural (free variables split in two), surplus, artificial.
  std::vector<std::size_t> col_of(n), neg_col(n, SIZE_MAX);
  std::size_t ns = 0;
  for (std::size_t j = 0; j < n; ++j) {
    col_of[j] = ns++;
    if (!nonneg[j]) neg_col[j] = ns++;
  }
  const std::size_t surplus0 = ns, art0 = ns + m, total = ns + 2 * m;
  Tableau<T> tab(m, total);
  std::vector<bool> has_art(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != n) throw InvalidArgument("LP row has the wrong length");
    const bool flip = b[i] < T(0);
    const T sgn = flip ? T(-1) : T(1);
    for (std::size_t j = 0; j < n; ++j) {
      tab.at(i, col_of[j]) = sgn * a[i][j];
      if (neg_col[j] != SIZE_MAX) tab.at(i, neg_col[j]) = -sgn * a[i][j];
    }
    tab.at(i, surplus0 + i) = -sgn;
    tab.rhs(i) = sgn * b[i];
    if (flip) {
      tab.basis(i) = surplus0 + i;
    } else {
      tab.at(i, art0 + i) = T(1);
      tab.basis(i) = art0 + i;
      has_art[i] = true;
    }
  }

  // Phase one: minimize the sum of artificials.
  for (std::size_t i = 0; i < m; ++i) {
    if (!has_art[i]) continue;
    for (std::size_t j = 0; j <= total; ++j) {
      if (j < art0 || j == total) tab.obj(j) -= tab.at(i, j);
    }
  }
  tab.optimize(art0);
  LpResult<T> res;
  if (-tab.obj(total) > (eps == T(0) ? T(0) : T(1e-9))) {
    res.status = LpStatus::infeasible;
    return res;
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis(i) < art0) continue;
    for (std::size_t j = 0; j < art0; ++j) {
      if (ScalarTraits<T>::abs(tab.at(i, j)) > eps) {
        tab.pivot(i, j);
        break;
      }
    }
  }

  // Phase two.
  for (std::size_t j = 0; j <= total; ++j) tab.obj(j) = T(0);
  for (std::size_t j = 0; j < n; ++j) {
    tab.obj(col_of[j]) = c[j];
    if (neg_col[j] != SIZE_MAX) tab.obj(neg_col[j]) = -c[j];
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t bc = tab.basis(i);
    const T f = bc < art0 ? tab.obj(bc) : T(0);
    if (f == T(0)) continue;
    for (std::size_t j = 0; j <= total; ++j) tab.obj(j) -= f * tab.at(i, j);
  }
  if (!tab.optimize(art0)) {
    res.status = LpStatus::unbounded;
    return res;
  }
  std::vector<T> col_val(total, T(0));
  for (std::size_t i = 0; i < m; ++i) col_val[tab.basis(i)] = tab.rhs(i);
  res.x.assign(n, T(0));
  for (std::size_t j = 0; j < n; ++j) {
    res.x[j] = col_val[col_of[j]];
    if (neg_col[j] != SIZE_MAX) res.x[j] -= col_val[neg_col[j]];
  }
  res.value = -tab.obj(total);
  res.status = LpStatus::optimal;
  return res;
}

template LpResult<double> lp_minimize<double>(const std::vector<std::vector<double>>&, const std::vector<double>&,
                                              const std::vector<double>&, const std::vector<bool>&);
template LpResult<Rational> lp_minimize<Rational>(const std::vector<std::vector<Rational>>&,
                                                  const std::vector<Rational>&, const std::vector<Rational>&,
                                                  const std::vector<bool>&);

}  // namespace coordsim
