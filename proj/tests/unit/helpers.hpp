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

#include <filesystem>
#include <string>
#include <vector>

#include "fess/rng.hpp"
#include "fess/volume.hpp"

namespace fess::test {

inline Volume random_volume(Rng& rng, const Shape& shape, double lo = -1.0,
                            double hi = 1.0) {
  std::vector<double> v(shape_size(shape));
  for (double& x : v) x = rng.uniform(lo, hi);
  return Volume(shape, std::move(v));
}

inline BinaryMask random_mask(Rng& rng, const Shape& shape, double p = 0.3) {
  std::vector<double> v(shape_size(shape));
  for (double& x : v) x = rng.uniform() < p ? 1.0 : 0.0;
  return BinaryMask(Volume(shape, std::move(v)));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fess_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fess::test
