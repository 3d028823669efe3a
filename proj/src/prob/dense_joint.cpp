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

#include "coordsim/prob/dense_joint.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "coordsim/error.hpp"

namespace coordsim {

Alphabet::Alphabet(std::size_t size) {
  if (size == 0) throw InvalidArgument("alphabet size must be positive");
  symbols_.reserve(size);
  for (std::size_t i = 0; i < size; ++i) symbols_.push_back(std::to_string(i));
}

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw InvalidArgument("alphabet must have at least one symbol");
  std::set<std::string> seen(symbols_.begin(), symbols_.end());
  if (seen.size() != symbols_.size()) throw InvalidArgument("alphabet labels must be unique");
}

std::size_t Alphabet::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] == label) return i;
  }
  throw InvalidArgument("unknown symbol '" + std::string(label) + "'");
}

std::size_t Shape::cells() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::size_t> Shape::strides() const {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * dims[i];
  return s;
}

std::vector<double> marginalize(const Shape& shape, std::span<const double> mass,
                                std::span<const std::size_t> keep) {
  const std::size_t rank = shape.dims.size();
  std::vector<std::size_t> out_stride(rank, 0);
  std::size_t out_size = 1;
  for (std::size_t k = keep.size(); k-- > 0;) {
    out_stride[keep[k]] = out_size;
    out_size *= shape.dims[keep[k]];
  }
  std::vector<double> out(out_size, 0.0);
  if (rank == 0) {
    out[0] = mass.empty() ? 0.0 : mass[0];
    return out;
  }

  // Odometer over all cells, tracking the output offset incrementally.
  std::vector<std::size_t> idx(rank, 0);
  std::size_t off = 0;
  const std::size_t total = mass.size();
  for (std::size_t cell = 0; cell < total; ++cell) {
    out[off] += mass[cell];
    for (std::size_t a = rank; a-- > 0;) {
      if (++idx[a] < shape.dims[a]) {
        off += out_stride[a];
        break;
      }
      off -= out_stride[a] * (shape.dims[a] - 1);
      idx[a] = 0;
    }
  }
  return out;
}

double entropy_bits(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

namespace {

Shape shape_of(const std::vector<Axis>& axes) {
  Shape s;
  s.dims.reserve(axes.size());
  for (const auto& a : axes) s.dims.push_back(a.alphabet.size());
  return s;
}

double compensated_sum(std::span<const double> v) {
  double sum = 0.0, c = 0.0;
  for (double x : v) {
    double y = x - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

DenseJoint::DenseJoint(std::vector<Axis> axes, std::vector<double> mass)
    : axes_(std::move(axes)), shape_(shape_of(axes_)), mass_(std::move(mass)) {
  std::set<std::string> names;
  for (const auto& a : axes_) {
    if (a.name.empty()) throw InvalidArgument("axis name must be non-empty");
    if (!names.insert(a.name).second) throw InvalidArgument("duplicate axis name '" + a.name + "'");
  }
  if (mass_.size() != shape_.cells()) {
    throw InvalidArgument("mass has " + std::to_string(mass_.size()) + " entries, shape needs " +
                          std::to_string(shape_.cells()));
  }
  for (double v : mass_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("probability entries must be finite and >= 0");
  }
  const double sum = compensated_sum(mass_);
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw InvalidArgument("probability mass sums to " + std::to_string(sum) + ", not 1");
  }
}

DenseJoint DenseJoint::point_mass(std::vector<Axis> axes, std::span<const std::size_t> cell) {
  Shape s = shape_of(axes);
  if (cell.size() != s.dims.size()) throw InvalidArgument("point mass index has wrong rank");
  std::vector<double> m(s.cells(), 0.0);
  auto st = s.strides();
  std::size_t off = 0;
  for (std::size_t i = 0; i < cell.size(); ++i) {
    if (cell[i] >= s.dims[i]) throw InvalidArgument("point mass index out of range");
    off += cell[i] * st[i];
  }
  m[off] = 1.0;
  return DenseJoint(std::move(axes), std::move(m));
}

DenseJoint DenseJoint::uniform(std::vector<Axis> axes) {
  Shape s = shape_of(axes);
  std::vector<double> m(s.cells(), 1.0 / static_cast<double>(s.cells()));
  return DenseJoint(std::move(axes), std::move(m));
}

bool DenseJoint::has_axis(std::string_view name) const {
  return std::any_of(axes_.begin(), axes_.end(), [&](const Axis& a) { return a.name == name; });
}

std::size_t DenseJoint::axis_index(std::string_view name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].name == name) return i;
  }
  throw InvalidArgument("unknown variable '" + std::string(name) + "'");
}

std::vector<std::size_t> DenseJoint::axis_indices(const NameSet& names) const {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(axis_index(n));
  return out;
}

NameSet DenseJoint::axis_names() const {
  NameSet out;
  for (const auto& a : axes_) out.push_back(a.name);
  return out;
}

std::size_t DenseJoint::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != axes_.size()) throw InvalidArgument("index rank mismatch");
  auto st = shape_.strides();
  std::size_t off = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= shape_.dims[i]) throw InvalidArgument("index out of range");
    off += index[i] * st[i];
  }
  return off;
}

double DenseJoint::at(std::span<const std::size_t> index) const { return mass_[flat_index(index)]; }

DenseJoint DenseJoint::marginal(const NameSet& names) const {
  auto keep = axis_indices(names);
  std::set<std::size_t> uniq(keep.begin(), keep.end());
  if (uniq.size() != keep.size()) throw InvalidArgument("repeated variable in marginal request");
  std::vector<Axis> out_axes;
  for (auto k : keep) out_axes.push_back(axes_[k]);
  auto m = marginalize(shape_, mass_, keep);
  return DenseJoint(std::move(out_axes), std::move(m));
}

}  // namespace coordsim
