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

#include "fess/metrics.hpp"

#include <cmath>

#include "fess/error.hpp"

namespace fess {

ConfusionCounts confusion(const Volume& pred_prob, const BinaryMask& truth,
                          double threshold) {
  if (pred_prob.shape() != truth.shape()) {
    throw ValidationError("confusion: prediction shape " +
                          shape_to_string(pred_prob.shape()) +
                          " vs truth shape " + shape_to_string(truth.shape()));
  }
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("threshold must lie in (0,1)");
  }
  ConfusionCounts c;
  const auto p = pred_prob.data();
  const auto y = truth.data();
  for (std::size_t v = 0; v < p.size(); ++v) {
    const bool pos = p[v] >= threshold;
    const bool fg = y[v] == 1.0;
    if (pos && fg) ++c.tp;
    else if (pos) ++c.fp;
    else if (fg) ++c.fn;
    else ++c.tn;
  }
  return c;
}

namespace {
double ratio(double num, double den) { return den > 0.0 ? num / den : 1.0; }
}  // namespace

MetricReport report(const ConfusionCounts& counts) {
  if (counts.total() == 0) {
    throw ValidationError("cannot report metrics for empty confusion counts");
  }
  const double tp = static_cast<double>(counts.tp);
  const double fp = static_cast<double>(counts.fp);
  const double tn = static_cast<double>(counts.tn);
  const double fn = static_cast<double>(counts.fn);
  MetricReport r;
  r.dice = ratio(2.0 * tp, 2.0 * tp + fp + fn);
  r.iou = ratio(tp, tp + fp + fn);
  r.precision = ratio(tp, tp + fp);
  r.specificity = ratio(tn, tn + fp);
  r.sensitivity = ratio(tp, tp + fn);
  r.counts = counts;
  return r;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    s.std_error = s.stddev / std::sqrt(static_cast<double>(values.size()));
  }
  return s;
}

}  // namespace fess
