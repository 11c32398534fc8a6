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
#include <functional>
#include <span>
#include <vector>

#include "fess/rng.hpp"
#include "fess/tape.hpp"

namespace fess {

/// Builds a scalar on the given tape from the differentiable input x.
using ScalarFn = std::function<Var(Tape& tape, Var x)>;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  bool finite = true;
  bool passed = false;
};

/// Compares the tape gradient of f at x against central differences
/// (f(x + h e_i) - f(x - h e_i)) / 2h. Relative error uses the denominator
/// max(|analytic|, |numeric|, 1e-8). When `coords` is empty every coordinate
/// is checked. Non-finite evaluations fail the check instead of throwing.
GradCheckReport finite_diff_check(const ScalarFn& f, const Volume& x,
                                  double step, double tol,
                                  std::span<const std::size_t> coords = {});

/// `count` distinct indices in [0, size), sorted.
std::vector<std::size_t> sample_coordinates(std::size_t size, std::size_t count,
                                            Rng& rng);

}  // namespace fess
