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
#include <filesystem>
#include <utility>
#include <vector>

#include "fess/rng.hpp"
#include "fess/volume.hpp"

namespace fess {

/// Parameters of the synthetic volume generator: bright ellipsoids on a dark
/// background with additive Gaussian noise.
struct SyntheticSpec {
  std::size_t extent = 16;
  std::size_t min_ellipsoids = 1;
  std::size_t max_ellipsoids = 3;
  double min_radius = 2.0;
  double max_radius = 5.0;
  double foreground_mean = 0.8;
  double background_mean = 0.2;
  double noise_sigma = 0.15;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Ellipsoid {
  double center[3];
  double radius[3];
};

struct Sample {
  Volume image;     // (i, j, k), values in [0, 1]
  BinaryMask mask;  // (i, j, k)
};

/// Ellipsoids of sample `index`. Centers are uniform over positions that keep
/// the ellipsoid inside the volume; radii are uniform per axis.
std::vector<Ellipsoid> draw_ellipsoids(const SyntheticSpec& spec,
                                       std::uint64_t index);

/// Voxel (i,j,k) is foreground iff sum(((x - c) / r)^2) <= 1 for some
/// ellipsoid.
BinaryMask rasterize(std::size_t extent, const std::vector<Ellipsoid>& shapes);

Sample generate_one(const SyntheticSpec& spec, std::uint64_t index);
std::vector<Sample> generate(const SyntheticSpec& spec, std::size_t count);

/// Seeded shuffle of [0, total) split into round(ratio * total) training
/// indices and the remainder.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t total, double ratio, std::uint64_t seed);

template <typename T>
std::pair<std::vector<T>, std::vector<T>> split(const std::vector<T>& items,
                                                double ratio,
                                                std::uint64_t seed) {
  auto [train_idx, test_idx] = split_indices(items.size(), ratio, seed);
  std::pair<std::vector<T>, std::vector<T>> out;
  for (std::size_t i : train_idx) out.first.push_back(items[i]);
  for (std::size_t i : test_idx) out.second.push_back(items[i]);
  return out;
}

/// Volume file: magic "FESSVOL1" (or "FESSMSK1" for masks), u32 rank, u32
/// extents, then little-endian f64 values in row-major order.
void save_volume(const std::filesystem::path& path, const Volume& v);
Volume load_volume(const std::filesystem::path& path);
void save_mask(const std::filesystem::path& path, const BinaryMask& m);
BinaryMask load_mask(const std::filesystem::path& path);

/// Writes image_NNNN.fvol / mask_NNNN.fmsk pairs into dir.
void save_samples(const std::filesystem::path& dir,
                  const std::vector<Sample>& samples);
/// Loads every pair written by save_samples, in index order.
std::vector<Sample> load_samples(const std::filesystem::path& dir);

}  // namespace fess
