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

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace fess {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);
std::size_t shape_size(const Shape& shape);

/// Dense row-major tensor of doubles, last axis fastest.
///
/// Rank 3 holds a spatial block (i,j,k), rank 4 a batch (n,i,j,k) and rank 5
/// a batched feature map (n,i,j,k,l). A rank-0 volume is a scalar. Every
/// extent is at least one and every stored value is finite; the constructor
/// enforces both, so a Volume that exists is always valid.
class Volume {
 public:
  Volume() : data_(1, 0.0) {}
  Volume(Shape shape, std::vector<double> data);

  static Volume zeros(Shape shape);
  static Volume ones(Shape shape);
  static Volume filled(Shape shape, double value);
  static Volume scalar(double value);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t extent(std::size_t axis) const;

  std::span<const double> data() const noexcept { return data_; }
  double operator[](std::size_t flat) const { return data_[flat]; }
  double at(std::initializer_list<std::size_t> index) const;

  /// Value of a rank-0 or single-element volume.
  double item() const;

  /// Same data under a new shape of equal element count.
  Volume reshaped(Shape shape) const;

  bool operator==(const Volume& other) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

enum class ElementwiseOp { kAdd, kSub, kMul };

Volume elementwise(const Volume& a, const Volume& b, ElementwiseOp op);

/// Sums over the listed axes (removed from the result). An empty axis list
/// sums everything into a scalar.
Volume reduce_sum(const Volume& a, std::span<const std::size_t> axes = {});

/// sqrt of the sum of squares over the listed axes; empty means all axes.
Volume l2_norm(const Volume& a, std::span<const std::size_t> axes = {});

Volume scale(const Volume& a, double factor);

/// Reorders axes; result axis d is input axis perm[d].
Volume permute(const Volume& a, std::span<const std::size_t> perm);

/// Binary mask over (i,j,k) or (n,i,j,k) with values in {0,1}.
class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(Volume values);

  const Volume& volume() const noexcept { return values_; }
  const Shape& shape() const noexcept { return values_.shape(); }
  std::span<const double> data() const noexcept { return values_.data(); }
  std::size_t foreground() const;

  bool operator==(const BinaryMask& other) const = default;

 private:
  Volume values_;
};

}  // namespace fess
