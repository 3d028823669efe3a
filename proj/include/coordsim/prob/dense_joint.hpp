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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coordsim {

/// Ordered list of distinct symbol labels.
class Alphabet {
 public:
  /// Labels "0", "1", ..., "size-1".
  explicit Alphabet(std::size_t size);
  explicit Alphabet(std::vector<std::string> symbols);

  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::size_t index_of(std::string_view label) const;

  bool operator==(const Alphabet& other) const = default;

 private:
  std::vector<std::string> symbols_;
};

struct Axis {
  std::string name;
  Alphabet alphabet;

  bool operator==(const Axis& other) const = default;
};

using NameSet = std::vector<std::string>;

/// Row-major shape helper shared by the dense tensors in this library.
struct Shape {
  std::vector<std::size_t> dims;

  std::size_t cells() const;
  std::vector<std::size_t> strides() const;
};

/// Sums `mass` (laid out by `shape`) down to the axes in `keep`, in that order.
std::vector<double> marginalize(const Shape& shape, std::span<const double> mass,
                                std::span<const std::size_t> keep);

/// Shannon entropy in bits of an (unnormalized-safe) probability vector.
double entropy_bits(std::span<const double> p);

/// Probability tensor over named finite axes. Entries are non-negative and
/// sum to one within 1e-12; axis names are unique.
class DenseJoint {
 public:
  static constexpr double kSumTolerance = 1e-12;

  DenseJoint(std::vector<Axis> axes, std::vector<double> mass);

  /// Point mass on one cell.
  static DenseJoint point_mass(std::vector<Axis> axes, std::span<const std::size_t> cell);
  static DenseJoint uniform(std::vector<Axis> axes);

  const std::vector<Axis>& axes() const { return axes_; }
  std::span<const double> mass() const { return mass_; }
  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return axes_.size(); }
  std::size_t cells() const { return mass_.size(); }

  bool has_axis(std::string_view name) const;
  std::size_t axis_index(std::string_view name) const;
  std::vector<std::size_t> axis_indices(const NameSet& names) const;
  NameSet axis_names() const;

  double at(std::span<const std::size_t> index) const;
  std::size_t flat_index(std::span<const std::size_t> index) const;

  /// Marginal over `names`, with axes in the order given.
  DenseJoint marginal(const NameSet& names) const;

  /// Same distribution with axes permuted into `names` order.
  DenseJoint reordered(const NameSet& names) const { return marginal(names); }

  bool same_axes(const DenseJoint& other) const { return axes_ == other.axes_; }

 private:
  std::vector<Axis> axes_;
  Shape shape_;
  std::vector<double> mass_;
};

}  // namespace coordsim
