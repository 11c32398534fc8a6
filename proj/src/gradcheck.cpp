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

#include "fess/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "fess/error.hpp"

namespace fess {

namespace {

std::optional<double> evaluate(const ScalarFn& f, Volume x) {
  try {
    Tape tape;
    Var out = f(tape, tape.leaf(std::move(x)));
    const double v = tape.value(out).item();
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const NumericalError&) {
    return std::nullopt;
  }
}

}  // namespace

GradCheckReport finite_diff_check(const ScalarFn& f, const Volume& x,
                                  double step, double tol,
                                  std::span<const std::size_t> coords) {
  if (!(step > 0.0)) throw ValidationError("finite-difference step must be > 0");

  GradCheckReport report;
  std::vector<double> analytic;
  try {
    Tape tape;
    Var in = tape.leaf(x);
    Var out = f(tape, in);
    tape.backward(out);
    Volume g = tape.grad(in);
    analytic.assign(g.data().begin(), g.data().end());
  } catch (const NumericalError&) {
    report.finite = false;
    return report;
  }

  std::vector<std::size_t> all;
  if (coords.empty()) {
    all.resize(x.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    coords = all;
  }

  std::vector<double> probe(x.data().begin(), x.data().end());
  for (std::size_t i : coords) {
    if (i >= probe.size()) throw ValidationError("gradient-check index out of range");
    const double orig = probe[i];
    probe[i] = orig + step;
    auto plus = evaluate(f, Volume(x.shape(), probe));
    probe[i] = orig - step;
    auto minus = evaluate(f, Volume(x.shape(), probe));
    probe[i] = orig;
    if (!plus || !minus) {
      report.finite = false;
      return report;
    }
    const double numeric = (*plus - *minus) / (2.0 * step);
    const double denom =
        std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
    const double rel = std::abs(analytic[i] - numeric) / denom;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_index = i;
    }
    ++report.checked;
  }
  report.passed = report.max_rel_error < tol;
  return report;
}

std::vector<std::size_t> sample_coordinates(std::size_t size, std::size_t count,
                                            Rng& rng) {
  count = std::min(count, size);
  std::vector<std::size_t> pool(size);
  for (std::size_t i = 0; i < size; ++i) pool[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(size - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace fess
