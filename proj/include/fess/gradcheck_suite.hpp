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
#include <functional>
#include <string>
#include <vector>

#include "fess/gradcheck.hpp"

namespace fess {

struct GradcheckSettings {
  std::size_t seeds = 5;
  double step = 1e-5;
  double op_tolerance = 1e-5;       // registry ops and losses on raw inputs
  double network_tolerance = 1e-4;  // end to end through the U-Net
  std::size_t network_coords = 10;  // sampled coordinates per parameter tensor

  void validate() const;
};

struct GradcheckCase {
  std::string name;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  GradCheckReport report;
};

using GradcheckCallback = std::function<void(const GradcheckCase&)>;

/// Finite-difference checks of every registry op, every loss and every
/// network parameter tensor, repeated for `settings.seeds` seeds derived from
/// `seed`. Op and loss inputs have batch 2 and spatial extent 4; the network
/// check uses a single 4x4x4 volume with a previous-batch embedding present.
/// `on_case` is called as each case finishes.
std::vector<GradcheckCase> run_gradcheck_suite(
    const GradcheckSettings& settings, std::uint64_t seed,
    const GradcheckCallback& on_case = {});

}  // namespace fess
