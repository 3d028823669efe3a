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


#include "coordsim/fme/fme.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "coordsim/error.hpp"
#include "coordsim/fme/lp.hpp"
#include "coordsim/prob/info.hpp"
#include "coordsim/rng.hpp"

namespace coordsim {

namespace {

template <class T>
struct Row {
  std::vector<T> a;
  bool strict = false;
  T b{};
};

template <class T>
bool near(const T& x, const T& y, double tol) {
  if constexpr (std::is_same_v<T, double>) {
    return std::abs(x - y) <= tol;
  } else {
    return x == y;
  }
}

template <class T>
bool is_zero(const T& x, double tol) {
  return near(x, T(0), tol);
}

template <class T>
std::vector<Row<T>> to_rows(const LinearSystem& s) {
  std::vector<Row<T>> rows;
  for (const auto& q : s.ineqs) {
    Row<T> r;
    for (double c : q.coef) r.a.push_back(ScalarTraits<T>::from_double(c));
    r.b = ScalarTraits<T>::from_double(q.rhs);
    r.strict = q.rel == Relation::gt;
    rows.push_back(std::move(r));
  }
  return rows;
}

template <class T>
LinearSystem from_rows(std::vector<std::string> vars, const std::vector<Row<T>>& rows) {
  LinearSystem s;
  s.vars = std::move(vars);
  for (const auto& r : rows) {
    Inequality q;
    for (const auto& c : r.a) q.coef.push_back(ScalarTraits<T>::to_double(c));
    q.rhs = ScalarTraits<T>::to_double(r.b);
    q.rel = r.strict ? Relation::gt : Relation::ge;
    s.ineqs.push_back(std::move(q));
  }
  return s;
}

template <class T>
void normalize(Row<T>& r, double tol) {
  T mx(0);
  for (const auto& c : r.a) mx = std::max(mx, ScalarTraits<T>::abs(c));
  if (is_zero(mx, tol)) {
    for (auto& c : r.a) c = T(0);
    return;
  }
  for (auto& c : r.a) {
    c /= mx;
    if (is_zero(c, tol)) c = T(0);
  }
  r.b /= mx;
}

// Normalization, tautology removal, duplicate and parallel dominance.
template <class T>
std::vector<Row<T>> simplify(std::vector<Row<T>> rows, double tol) {
  std::vector<Row<T>> out;
  bool infeasible_kept = false;
  for (auto& r : rows) {
    normalize(r, tol);
    const bool zero = std::all_of(r.a.begin(), r.a.end(), [&](const T& c) { return is_zero(c, tol); });
    if (zero) {
      // 0 >= b or 0 > b.
      const bool holds = r.strict ? r.b < T(0) || is_zero(r.b, tol) : !(r.b > T(0)) || is_zero(r.b, tol);
      if (holds || infeasible_kept) continue;
      infeasible_kept = true;
      out.push_back(std::move(r));
      continue;
    }
    bool merged = false;
    for (auto& o : out) {
      bool same = o.a.size() == r.a.size();
      for (std::size_t j = 0; same && j < r.a.size(); ++j) same = near(o.a[j], r.a[j], tol);
      if (!same) continue;
      if (near(o.b, r.b, tol)) {
        o.strict = o.strict || r.strict;
      } else if (r.b > o.b) {
        o.b = r.b;
        o.strict = r.strict;
      }
      merged = true;
      break;
    }
    if (!merged) out.push_back(std::move(r));
  }
  return out;
}

// Removes rows implied by the others (closures compared).
template <class T>
std::vector<Row<T>> lp_prune(std::vector<Row<T>> rows, double tol) {
  if (rows.empty()) return rows;
  const std::size_t n = rows[0].a.size();
  if (n == 0) return rows;
  const std::vector<bool> free(n, false);
  std::vector<bool> keep(rows.size(), true);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::vector<std::vector<T>> a;
    std::vector<T> b;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == k || !keep[i]) continue;
      a.push_back(rows[i].a);
      b.push_back(rows[i].b);
    }
    if (a.empty()) continue;
    const auto res = lp_minimize<T>(a, b, rows[k].a, free);
    if (res.status == LpStatus::infeasible) break;
    if (res.status == LpStatus::unbounded) continue;
    bool implied;
    if constexpr (std::is_same_v<T, double>) {
      implied = res.value >= rows[k].b - tol;
    } else {
      implied = res.value >= rows[k].b;
    }
    if (implied) keep[k] = false;
  }
  std::vector<Row<T>> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (keep[i]) out.push_back(std::move(rows[i]));
  }
  return out;
}

template <class T>
std::vector<Row<T>> eliminate_column(const std::vector<Row<T>>& rows, std::size_t k, double tol) {
  std::vector<Row<T>> pos, neg, out;
  auto drop = [k](const Row<T>& r) {
    Row<T> o = r;
    o.a.erase(o.a.begin() + static_cast<std::ptrdiff_t>(k));
    return o;
  };
  for (const auto& r : rows) {
    if (is_zero(r.a[k], tol)) {
      out.push_back(drop(r));
    } else if (r.a[k] > T(0)) {
      pos.push_back(r);
    } else {
      neg.push_back(r);
    }
  }
  for (const auto& p : pos)
    for (const auto& q : neg) {
      const T wp = -q.a[k], wq = p.a[k];
      Row<T> c;
      c.a.resize(p.a.size());
      for (std::size_t j = 0; j < p.a.size(); ++j) c.a[j] = wp * p.a[j] + wq * q.a[j];
      c.b = wp * p.b + wq * q.b;
      c.strict = p.strict || q.strict;
      c.a[k] = T(0);
      out.push_back(drop(c));
    }
  return out;
}

template <class T>
LinearSystem prune_impl(const LinearSystem& s, const FmeOptions& o) {
  auto rows = simplify(to_rows<T>(s), o.tol);
  if (o.prune_lp) rows = lp_prune(std::move(rows), o.tol);
  return from_rows(s.vars, rows);
}

template <class T>
LinearSystem eliminate_impl(const LinearSystem& s, const std::vector<std::string>& vars, const FmeOptions& o) {
  auto names = s.vars;
  auto rows = simplify(to_rows<T>(s), o.tol);
  for (const auto& v : vars) {
    const auto it = std::find(names.begin(), names.end(), v);
    if (it == names.end()) throw InvalidArgument("cannot eliminate unknown variable " + v);
    const auto k = static_cast<std::size_t>(it - names.begin());
    rows = simplify(eliminate_column(rows, k, o.tol), o.tol);
    if (o.prune_lp) rows = lp_prune(std::move(rows), o.tol);
    names.erase(it);
  }
  return from_rows(std::move(names), rows);
}

}  // namespace

std::size_t LinearSystem::index_of(const std::string& name) const {
  const auto it = std::find(vars.begin(), vars.end(), name);
  if (it == vars.end()) throw InvalidArgument("unknown variable " + name);
  return static_cast<std::size_t>(it - vars.begin());
}

void LinearSystem::add(const std::vector<std::pair<std::string, double>>& terms, Relation rel, double rhs) {
  Inequality q;
  q.coef.assign(vars.size(), 0.0);
  for (const auto& [name, c] : terms) q.coef[index_of(name)] += c;
  q.rel = rel;
  q.rhs = rhs;
  ineqs.push_back(std::move(q));
}

void LinearSystem::check() const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j) {
      if (vars[i] == vars[j]) throw InvalidArgument("duplicate variable " + vars[i]);
    }
  for (const auto& q : ineqs) {
    if (q.coef.size() != vars.size()) throw InvalidArgument("inequality has the wrong number of coefficients");
    if (!std::isfinite(q.rhs)) throw InvalidArgument("inequality constant must be finite");
    for (double c : q.coef) {
      if (!std::isfinite(c)) throw InvalidArgument("inequality coefficient must be finite");
    }
  }
}

bool LinearSystem::satisfied(const std::vector<double>& x, double tol) const {
  for (const auto& q : ineqs) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += q.coef[j] * x[j];
    if (s < q.rhs - tol) return false;
  }
  return true;
}

std::string rate_name(int i) { return "R" + std::to_string(i); }
std::string rate_tilde_name(int i) { return "Rt" + std::to_string(i); }

LinearSystem per_round_system(const DenseJoint& joint) {
  const int r = rounds_of(joint);
  LinearSystem s;
  s.vars = {"R0", "R12", "R21"};
  for (int i = 1; i <= r; ++i) s.vars.push_back(rate_name(i));
  for (int i = 1; i <= r; ++i) s.vars.push_back(rate_tilde_name(i));

  s.add({{"R0", 1}}, Relation::ge, 0);
  for (int i = 1; i <= r; ++i) s.add({{rate_name(i), 1}}, Relation::ge, 0);
  s.add({{"R12", 1}}, Relation::ge, 0);
  s.add({{"R21", 1}}, Relation::ge, 0);

  std::vector<std::pair<std::string, double>> odd{{"R12", 1}}, even{{"R21", 1}};
  for (int i = 1; i <= r; ++i) (i % 2 == 1 ? odd : even).push_back({rate_name(i), -1});
  auto negate = [](auto terms) {
    for (auto& t : terms) t.second = -t.second;
    return terms;
  };
  s.add(odd, Relation::ge, 0);
  s.add(negate(odd), Relation::ge, 0);
  s.add(even, Relation::ge, 0);
  s.add(negate(even), Relation::ge, 0);

  NameSet before;
  for (int i = 1; i <= r; ++i) {
    const std::string fi = f_name(i);
    NameSet given_other = before, given_owner = before;
    given_other.push_back(other_of_round(i));
    given_owner.push_back(owner_of_round(i));
    const double h_other = entropy(joint, {fi}, given_other).bits;
    const double h_owner = entropy(joint, {fi}, given_owner).bits;
    if (i == 1) {
      s.add({{rate_name(1), 1}, {"R0", 1}, {rate_tilde_name(1), 1}}, Relation::ge, h_other);
      s.add({{"R0", -1}, {rate_tilde_name(1), -1}}, Relation::gt, -h_owner);
    } else {
      s.add({{rate_name(i), 1}, {rate_tilde_name(i), 1}}, Relation::ge, h_other);
      s.add({{rate_tilde_name(i), -1}}, Relation::gt, -h_owner);
    }
    before.push_back(fi);
  }
  std::vector<std::pair<std::string, double>> sum;
  for (int i = 1; i <= r; ++i) {
    sum.push_back({rate_tilde_name(i), -1});
    NameSet fs(before.begin(), before.begin() + i);
    s.add(sum, Relation::gt, -entropy(joint, fs, {"X1", "X2", "Y1", "Y2"}).bits);
  }
  return s;
}

LinearSystem theorem1_system(const RegionEval& e) {
  LinearSystem s;
  s.vars = {"R0", "R12", "R21"};
  s.add({{"R12", 1}}, Relation::ge, e.rhs[0]);
  s.add({{"R21", 1}}, Relation::ge, e.rhs[1]);
  s.add({{"R0", 1}, {"R12", 1}}, Relation::ge, e.rhs[2]);
  s.add({{"R0", 1}, {"R12", 1}, {"R21", 1}}, Relation::ge, e.rhs[3]);
  s.add({{"R0", 1}}, Relation::ge, 0);
  s.add({{"R12", 1}}, Relation::ge, 0);
  s.add({{"R21", 1}}, Relation::ge, 0);
  return s;
}

LinearSystem fme_eliminate(const LinearSystem& system, const std::vector<std::string>& vars,
                           const FmeOptions& options) {
  system.check();
  return options.exact ? eliminate_impl<Rational>(system, vars, options)
                       : eliminate_impl<double>(system, vars, options);
}

LinearSystem prune(const LinearSystem& system, const FmeOptions& options) {
  system.check();
  return options.exact ? prune_impl<Rational>(system, options) : prune_impl<double>(system, options);
}

double support_value(const LinearSystem& s, const std::vector<double>& c) {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (const auto& q : s.ineqs) {
    a.push_back(q.coef);
    b.push_back(q.rhs);
  }
  const auto res = lp_minimize<double>(a, b, c, std::vector<bool>(s.vars.size(), true));
  if (res.status == LpStatus::infeasible) return std::numeric_limits<double>::infinity();
  if (res.status == LpStatus::unbounded) return -std::numeric_limits<double>::infinity();
  return res.value;
}

PolyCompare polyhedra_equal(const LinearSystem& a, const LinearSystem& b, int directions, double tol,
                            std::uint64_t seed, int workers) {
  a.check();
  b.check();
  if (directions < 0 || workers < 1) throw InvalidArgument("need directions >= 0 and workers >= 1");
  if (a.vars.size() != b.vars.size()) throw InvalidArgument("systems have different variables");
  // Reorder b's columns to a's variable order.
  LinearSystem bb;
  bb.vars = a.vars;
  std::vector<std::size_t> perm;
  for (const auto& v : a.vars) perm.push_back(b.index_of(v));
  for (const auto& q : b.ineqs) {
    Inequality r = q;
    for (std::size_t j = 0; j < perm.size(); ++j) r.coef[j] = q.coef[perm[j]];
    bb.ineqs.push_back(std::move(r));
  }

  const std::size_t n = a.vars.size();
  PolyCompare out;
  out.probes.resize(n + static_cast<std::size_t>(directions));
  for (std::size_t k = 0; k < out.probes.size(); ++k) {
    auto& d = out.probes[k].direction;
    d.assign(n, 0.0);
    if (k < n) {
      d[k] = 1.0;
    } else {
      Rng rng(derive_seed(seed, 31, k));
      double norm = 0.0;
      for (auto& v : d) {
        v = rng.exponential();
        norm += v * v;
      }
      for (auto& v : d) v /= std::sqrt(norm);
    }
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < out.probes.size(); k = next++) {
      auto& p = out.probes[k];
      p.a = support_value(a, p.direction);
      p.b = support_value(bb, p.direction);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  if (!out.probes.empty()) {
    out.a_empty = std::isinf(out.probes[0].a) && out.probes[0].a > 0;
    out.b_empty = std::isinf(out.probes[0].b) && out.probes[0].b > 0;
  }
  for (const auto& p : out.probes) {
    double gap;
    if (p.a == p.b) {
      gap = 0.0;
    } else if (std::isinf(p.a) || std::isinf(p.b)) {
      gap = std::numeric_limits<double>::infinity();
    } else {
      gap = std::abs(p.a - p.b);
    }
    out.worst_gap = std::max(out.worst_gap, gap);
  }
  out.equal = out.worst_gap <= tol;
  return out;
}

nlohmann::json to_json(const LinearSystem& s) {
  nlohmann::json ineqs = nlohmann::json::array();
  for (const auto& q : s.ineqs) {
    ineqs.push_back({{"coef", q.coef}, {"rel", q.rel == Relation::gt ? ">" : ">="}, {"rhs", q.rhs}});
  }
  return {{"vars", s.vars}, {"ineqs", ineqs}};
}

LinearSystem linear_system_from_json(const nlohmann::json& j) {
  try {
    LinearSystem s;
    s.vars = j.at("vars").get<std::vector<std::string>>();
    for (const auto& q : j.at("ineqs")) {
      Inequality in;
      in.coef = q.at("coef").get<std::vector<double>>();
      const auto rel = q.at("rel").get<std::string>();
      if (rel == ">=") {
        in.rel = Relation::ge;
      } else if (rel == ">") {
        in.rel = Relation::gt;
      } else {
        throw ParseError("relation must be \">=\" or \">\"");
      }
      in.rhs = q.at("rhs").get<double>();
      s.ineqs.push_back(std::move(in));
    }
    s.check();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed linear system: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid linear system: ") + e.what());
  }
}

}  // namespace coordsim
