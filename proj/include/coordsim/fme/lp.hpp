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
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace coordsim {

using Rational = boost::multiprecision::cpp_rational;

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr double eps = 1e-10;
  static double from_double(double v) { return v; }
  static double to_double(double v) { return v; }
  static double abs(double v) { return v < 0 ? -v : v; }
};

template <>
struct ScalarTraits<Rational> {
  /// Rounded to 12 decimal digits.
  static Rational from_double(double v);
  static double to_double(const Rational& v) { return v.convert_to<double>(); }
  static Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }
};

enum class LpStatus { optimal, infeasible, unbounded };

template <class T>
struct LpResult {
  LpStatus status = LpStatus::infeasible;
  T value{};
  std::vector<T> x;
};

/// minimize c.x subject to A x >= b, with x_j >= 0 where nonneg[j] and free
/// otherwise. Dense two-phase tableau simplex with Bland's rule.
template <class T>
LpResult<T> lp_minimize(const std::vector<std::vector<T>>& a, const std::vector<T>& b, const std::vector<T>& c,
                        const std::vector<bool>& nonneg);

extern template LpResult<double> lp_minimize<double>(const std::vector<std::vector<double>>&,
                                                     const std::vector<double>&, const std::vector<double>&,
                                                     const std::vector<bool>&);
extern template LpResult<Rational> lp_minimize<Rational>(const std::vector<std::vector<Rational>>&,
                                                         const std::vector<Rational>&, const std::vector<Rational>&,
                                                         const std::vector<bool>&);

}  // namespace coordsim
