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

#include <cstdint>
#include <span>

#include "fess/volume.hpp"

namespace fess {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

struct MetricReport {
  double dice = 0.0;
  double iou = 0.0;
  double precision = 0.0;
  double specificity = 0.0;
  double sensitivity = 0.0;
  ConfusionCounts counts;

  bool operator==(const MetricReport&) const = default;
};

inline constexpr double kDefaultThreshold = 0.5;

/// Voxel counts after binarizing pred_prob at >= threshold.
ConfusionCounts confusion(const Volume& pred_prob, const BinaryMask& truth,
                          double threshold = kDefaultThreshold);

/// The five overlap metrics. A 0/0 ratio counts as 1.0 (nothing to find and
/// nothing found is a perfect result).
MetricReport report(const ConfusionCounts& counts);

/// Mean with sample standard deviation (n - 1) and standard error std/sqrt(n).
/// A single value has std = stderr = 0.
struct Summary {
  double mean = 0.0;
  double stddev = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

Summary summarize(std::span<const double> values);

}  // namespace fess
