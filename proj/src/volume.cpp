// Copyright 2026 The FESS Authors. All Rights Reserved.
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

#include "fess/volume.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fess/error.hpp"

namespace fess {

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ',';
    out << shape[i];
  }
  out << ')';
  return out.str();
}

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

Volume::Volume(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  for (std::size_t e : shape_) {
    if (e == 0) {
      throw ValidationError("volume extents must be >= 1, got " +
                            shape_to_string(shape_));
    }
  }
  if (shape_size(shape_) != data_.size()) {
    throw ValidationError("volume shape " + shape_to_string(shape_) +
                          " does not match data length " +
                          std::to_string(data_.size()));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw NumericalError("non-finite value at flat index " +
                           std::to_string(i) + " of volume " +
                           shape_to_string(shape_));
    }
  }
}

Volume Volume::zeros(Shape shape) { return filled(std::move(shape), 0.0); }
Volume Volume::ones(Shape shape) { return filled(std::move(shape), 1.0); }

Volume Volume::filled(Shape shape, double value) {
  const std::size_t n = shape_size(shape);
  return Volume(std::move(shape), std::vector<double>(n, value));
}

Volume Volume::scalar(double value) { return Volume({}, {value}); }

std::size_t Volume::extent(std::size_t axis) const {
  if (axis >= shape_.size()) {
    throw ValidationError("axis " + std::to_string(axis) +
                          " out of range for rank " +
                          std::to_string(shape_.size()));
  }
  return shape_[axis];
}

double Volume::at(std::initializer_list<std::size_t> index) const {
  if (index.size() != shape_.size()) {
    throw ValidationError("index rank mismatch");
  }
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (std::size_t i : index) {
    if (i >= shape_[axis]) throw ValidationError("index out of range");
    flat = flat * shape_[axis] + i;
    ++axis;
  }
  return data_[flat];
}

double Volume::item() const {
  if (data_.size() != 1) {
    throw ValidationError("item() on non-scalar volume " +
                          shape_to_string(shape_));
  }
  return data_[0];
}

Volume Volume::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size()) {
    throw ValidationError("cannot reshape " + shape_to_string(shape_) +
                          " to " + shape_to_string(shape));
  }
  return Volume(std::move(shape), data_);
}

Volume elementwise(const Volume& a, const Volume& b, ElementwiseOp op) {
  if (a.shape() != b.shape()) {
    throw ValidationError("shape mismatch: " + shape_to_string(a.shape()) +
                          " vs " + shape_to_string(b.shape()));
  }
  std::vector<double> out(a.size());
  auto x = a.data();
  auto y = b.data();
  switch (op) {
    case ElementwiseOp::kAdd:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
      break;
    case ElementwiseOp::kSub:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
      break;
    case ElementwiseOp::kMul:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
      break;
  }
  return Volume(a.shape(), std::move(out));
}

namespace {

// Maps every input flat index to its output flat index for a reduction.
template <typename Fn>
Volume reduce(const Volume& a, std::span<const std::size_t> axes, Fn&& acc) {
  const Shape& shape = a.shape();
  std::vector<bool> reduced(shape.size(), axes.empty());
  for (std::size_t ax : axes) {
    if (ax >= shape.size()) {
      throw ValidationError("reduction axis " + std::to_string(ax) +
                            " out of range for rank " +
                            std::to_string(shape.size()));
    }
    reduced[ax] = true;
  }
  Shape out_shape;
  for (std::size_t d = 0; d < shape.size(); ++d) {
    if (!reduced[d]) out_shape.push_back(shape[d]);
  }
  std::vector<double> out(shape_size(out_shape), 0.0);
  std::vector<std::size_t> index(shape.size(), 0);
  auto data = a.data();
  for (std::size_t flat = 0; flat < data.size(); ++flat) {
    std::size_t o = 0;
    for (std::size_t d = 0; d < shape.size(); ++d) {
      if (!reduced[d]) o = o * shape[d] + index[d];
    }
    out[o] = acc(out[o], data[flat]);
    for (std::size_t d = shape.size(); d-- > 0;) {
      if (++index[d] < shape[d]) break;
      index[d] = 0;
    }
  }
  return Volume(std::move(out_shape), std::move(out));
}

}  // namespace

Volume reduce_sum(const Volume& a, std::span<const std::size_t> axes) {
  return reduce(a, axes, [](double s, double v) { return s + v; });
}

Volume l2_norm(const Volume& a, std::span<const std::size_t> axes) {
  Volume squares =
      reduce(a, axes, [](double s, double v) { return s + v * v; });
  std::vector<double> out(squares.data().begin(), squares.data().end());
  for (double& v : out) v = std::sqrt(v);
  return Volume(squares.shape(), std::move(out));
}

Volume scale(const Volume& a, double factor) {
  std::vector<double> out(a.data().begin(), a.data().end());
  for (double& v : out) v *= factor;
  return Volume(a.shape(), std::move(out));
}

Volume permute(const Volume& a, std::span<const std::size_t> perm) {
  const Shape& shape = a.shape();
  if (perm.size() != shape.size()) {
    throw ValidationError("permutation rank mismatch");
  }
  std::vector<bool> seen(shape.size(), false);
  Shape out_shape(shape.size());
  for (std::size_t d = 0; d < perm.size(); ++d) {
    if (perm[d] >= shape.size() || seen[perm[d]]) {
      throw ValidationError("invalid axis permutation");
    }
    seen[perm[d]] = true;
    out_shape[d] = shape[perm[d]];
  }
  // Input strides reordered into output axis order.
  std::vector<std::size_t> in_stride(shape.size(), 1);
  for (std::size_t d = shape.size(); d-- > 1;) {
    in_stride[d - 1] = in_stride[d] * shape[d];
  }
  std::vector<std::size_t> stride(shape.size());
  for (std::size_t d = 0; d < perm.size(); ++d) stride[d] = in_stride[perm[d]];

  std::vector<double> out(a.size());
  std::vector<std::size_t> index(shape.size(), 0);
  auto data = a.data();
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t src = 0;
    for (std::size_t d = 0; d < index.size(); ++d) src += index[d] * stride[d];
    out[flat] = data[src];
    for (std::size_t d = out_shape.size(); d-- > 0;) {
      if (++index[d] < out_shape[d]) break;
      index[d] = 0;
    }
  }
  return Volume(std::move(out_shape), std::move(out));
}

BinaryMask::BinaryMask(Volume values) : values_(std::move(values)) {
  if (values_.rank() != 3 && values_.rank() != 4) {
    throw ValidationError("mask must have rank 3 or 4, got " +
                          shape_to_string(values_.shape()));
  }
  for (double v : values_.data()) {
    if (v != 0.0 && v != 1.0) {
      throw ValidationError("mask values must be 0 or 1");
    }
  }
}

std::size_t BinaryMask::foreground() const {
  return static_cast<std::size_t>(
      std::count(values_.data().begin(), values_.data().end(), 1.0));
}

}  // namespace fess
