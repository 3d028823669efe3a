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


#include "coordsim/rate/scheme.hpp"

#include <algorithm>
#include <cmath>

#include "coordsim/error.hpp"

namespace coordsim {

namespace {

constexpr double kRowTolerance = 1e-12;

void check_rows(const ConditionalTable& t, const char* what) {
  for (std::size_t row = 0; row < t.rows(); ++row) {
    double s = 0.0;
    for (std::size_t k = 0; k < t.var_size; ++k) {
      const double v = t.table[row * t.var_size + k];
      if (!std::isfinite(v) || v < 0.0) throw InvalidArgument(std::string(what) + ": negative or non-finite entry");
      s += v;
    }
    if (std::abs(s - 1.0) > kRowTolerance) throw InvalidArgument(std::string(what) + ": row does not sum to 1");
  }
}

ConditionalTable shaped(std::string var, std::size_t var_size, NameSet given, std::vector<std::size_t> sizes) {
  ConditionalTable t;
  t.var = std::move(var);
  t.var_size = var_size;
  t.given = std::move(given);
  t.given_sizes = std::move(sizes);
  std::size_t rows = 1;
  for (auto s : t.given_sizes) rows *= s;
  t.table.assign(rows * var_size, 0.0);
  return t;
}

void check_shape(const ConditionalTable& t, const ConditionalTable& want) {
  if (t.var != want.var || t.given != want.given || t.given_sizes != want.given_sizes ||
      t.var_size != want.var_size || t.table.size() != want.table.size()) {
    throw InvalidArgument("table for " + want.var + " has the wrong shape");
  }
}

}  // namespace

ChannelSpec::ChannelSpec(DenseJoint q_x, Alphabet y1, Alphabet y2, std::vector<double> q_y_given_x)
    : q_x_(std::move(q_x)), y1_(std::move(y1)), y2_(std::move(y2)), kernel_(std::move(q_y_given_x)) {
  if (q_x_.rank() != 2 || q_x_.axes()[0].name != "X1" || q_x_.axes()[1].name != "X2") {
    throw InvalidArgument("q_x must be over (X1, X2)");
  }
  const std::size_t ys = y1_.size() * y2_.size();
  if (kernel_.size() != q_x_.cells() * ys) throw InvalidArgument("channel kernel has the wrong size");
  for (std::size_t x = 0; x < q_x_.cells(); ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < ys; ++y) {
      const double v = kernel_[x * ys + y];
      if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("channel kernel has a negative entry");
      s += v;
    }
    if (std::abs(s - 1.0) > kRowTolerance) throw InvalidArgument("channel slice does not sum to 1");
  }
}

DenseJoint ChannelSpec::target() const {
  const std::size_t ys = y1_.size() * y2_.size();
  std::vector<double> m(kernel_.size());
  for (std::size_t x = 0; x < q_x_.cells(); ++x)
    for (std::size_t y = 0; y < ys; ++y) m[x * ys + y] = q_x_.mass()[x] * kernel_[x * ys + y];
  return DenseJoint({q_x_.axes()[0], q_x_.axes()[1], {"Y1", y1_}, {"Y2", y2_}}, std::move(m));
}

bool ChannelSpec::deterministic() const {
  for (double v : kernel_) {
    if (v != 0.0 && v != 1.0) return false;
  }
  return true;
}

std::string f_name(int i) { return "F" + std::to_string(i); }

std::size_t cardinality_bound(std::size_t xy_cells, const std::vector<std::size_t>& earlier,
                              CardinalityPreset preset) {
  std::size_t prod = xy_cells;
  for (auto s : earlier) prod *= s;
  if (preset == CardinalityPreset::epsilon_lemma) return prod + 1;
  return earlier.empty() ? prod + 3 : prod + 2;
}

std::size_t cardinality_bound(const ChannelSpec& channel, const std::vector<std::size_t>& earlier,
                              CardinalityPreset preset) {
  return cardinality_bound(channel.xy_cells(), earlier, preset);
}

AuxScheme blank_scheme(const ChannelSpec& channel, const std::vector<std::size_t>& f_sizes) {
  if (f_sizes.empty()) throw InvalidArgument("scheme needs r >= 1");
  AuxScheme s;
  s.r = static_cast<int>(f_sizes.size());
  s.f_sizes = f_sizes;
  NameSet fs;
  std::vector<std::size_t> sizes;
  for (int i = 1; i <= s.r; ++i) {
    if (f_sizes[i - 1] == 0) throw InvalidArgument("auxiliary alphabet must be non-empty");
    const std::string owner = owner_of_round(i);
    NameSet given = fs;
    auto gs = sizes;
    given.push_back(owner);
    gs.push_back(owner == "X1" ? channel.x1().size() : channel.x2().size());
    s.rounds.push_back(shaped(f_name(i), f_sizes[i - 1], std::move(given), std::move(gs)));
    fs.push_back(f_name(i));
    sizes.push_back(f_sizes[i - 1]);
  }
  auto g1 = fs, g2 = fs;
  auto s1 = sizes, s2 = sizes;
  g1.push_back("X1");
  s1.push_back(channel.x1().size());
  g2.push_back("X2");
  s2.push_back(channel.x2().size());
  s.out1 = shaped("Y1", channel.y1().size(), std::move(g1), std::move(s1));
  s.out2 = shaped("Y2", channel.y2().size(), std::move(g2), std::move(s2));
  return s;
}

AuxScheme uniform_scheme(const ChannelSpec& channel, const std::vector<std::size_t>& f_sizes) {
  auto s = blank_scheme(channel, f_sizes);
  auto fill = [](ConditionalTable& t) {
    for (auto& v : t.table) v = 1.0 / static_cast<double>(t.var_size);
  };
  for (auto& t : s.rounds) fill(t);
  fill(s.out1);
  fill(s.out2);
  return s;
}

AuxScheme random_scheme(const ChannelSpec& channel, const std::vector<std::size_t>& f_sizes, Rng& rng,
                        double alpha) {
  auto s = blank_scheme(channel, f_sizes);
  auto fill = [&](ConditionalTable& t) {
    for (std::size_t row = 0; row < t.rows(); ++row) {
      const auto d = rng.dirichlet(t.var_size, alpha);
      std::copy(d.begin(), d.end(), t.table.begin() + static_cast<std::ptrdiff_t>(row * t.var_size));
    }
  };
  for (auto& t : s.rounds) fill(t);
  fill(s.out1);
  fill(s.out2);
  return s;
}

void AuxScheme::check(const ChannelSpec& channel) const {
  if (r < 1 || f_sizes.size() != static_cast<std::size_t>(r) || rounds.size() != f_sizes.size()) {
    throw InvalidArgument("scheme round count is inconsistent");
  }
  const auto want = blank_scheme(channel, f_sizes);
  for (int i = 0; i < r; ++i) {
    check_shape(rounds[i], want.rounds[i]);
    check_rows(rounds[i], "round table");
  }
  check_shape(out1, want.out1);
  check_shape(out2, want.out2);
  check_rows(out1, "Y1 table");
  check_rows(out2, "Y2 table");
}

}  // namespace coordsim
