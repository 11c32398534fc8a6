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

#include "fess/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "binary_io.hpp"
#include "fess/error.hpp"

namespace fess {

namespace {

constexpr char kVolumeMagic[8] = {'F', 'E', 'S', 'S', 'V', 'O', 'L', '1'};
constexpr char kMaskMagic[8] = {'F', 'E', 'S', 'S', 'M', 'S', 'K', '1'};

void write_file(const std::filesystem::path& path, const char (&magic)[8],
                const Volume& v) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(magic, 8);
  detail::write_u32(out, static_cast<std::uint32_t>(v.rank()));
  for (std::size_t e : v.shape()) {
    detail::write_u32(out, static_cast<std::uint32_t>(e));
  }
  detail::write_f64(out, v.data());
  if (!out) throw IoError("write failed for " + path.string());
}

Volume read_file(const std::filesystem::path& path, const char (&magic)[8]) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::error_code ec;
  const auto file_size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot stat " + path.string());
  detail::Reader r(in, path.string());

  char got[8];
  r.bytes(got, 8, "magic");
  if (!std::equal(got, got + 8, magic)) {
    throw IoError(path.string() + ": bad magic, expected " +
                  std::string(magic, 8));
  }
  const std::uint32_t rank = r.u32("rank");
  if (rank > 8) {
    throw IoError(path.string() + ": implausible rank " + std::to_string(rank));
  }
  Shape shape(rank);
  std::uint64_t count = 1;
  for (auto& e : shape) {
    e = r.u32("extent");
    if (e == 0) throw IoError(path.string() + ": zero extent");
    count *= e;
    if (count > file_size) {
      throw IoError(path.string() + ": extents exceed the file size");
    }
  }
  const std::uint64_t expected = 8 + 4 + 4 * std::uint64_t{rank} + 8 * count;
  if (file_size < expected) {
    throw IoError(path.string() + ": truncated file, expected " +
                  std::to_string(expected) + " bytes, found " +
                  std::to_string(file_size));
  }
  std::vector<double> data(count);
  r.f64(data, "voxel data");
  r.expect_end();
  try {
    return Volume(std::move(shape), std::move(data));
  } catch (const Error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string indexed(const char* prefix, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu.%s", prefix, i, ext);
  return buf;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (extent < 4 || extent % 4 != 0) {
    throw ValidationError("data.extent must be a positive multiple of 4");
  }
  if (min_ellipsoids < 1 || max_ellipsoids < min_ellipsoids) {
    throw ValidationError("ellipsoid count range must satisfy 1 <= min <= max");
  }
  if (!(min_radius > 0.0) || max_radius < min_radius) {
    throw ValidationError("radius range must satisfy 0 < min <= max");
  }
  if (2.0 * max_radius > static_cast<double>(extent) - 1.0) {
    throw ValidationError("max_radius " + std::to_string(max_radius) +
                          " does not fit inside extent " +
                          std::to_string(extent));
  }
  if (!(noise_sigma >= 0.0)) throw ValidationError("noise_sigma must be >= 0");
}

std::vector<Ellipsoid> draw_ellipsoids(const SyntheticSpec& spec,
                                       std::uint64_t index) {
  spec.validate();
  Rng rng = Rng::stream(spec.seed, "ellipsoids", index);
  const std::size_t span = spec.max_ellipsoids - spec.min_ellipsoids + 1;
  const std::size_t count = spec.min_ellipsoids + rng.below(span);
  const double hi = static_cast<double>(spec.extent) - 1.0;
  std::vector<Ellipsoid> shapes(count);
  for (Ellipsoid& e : shapes) {
    for (int a = 0; a < 3; ++a) {
      e.radius[a] = rng.uniform(spec.min_radius, spec.max_radius);
    }
    for (int a = 0; a < 3; ++a) {
      e.center[a] = rng.uniform(e.radius[a], hi - e.radius[a]);
    }
  }
  return shapes;
}

BinaryMask rasterize(std::size_t extent, const std::vector<Ellipsoid>& shapes) {
  std::vector<double> mask(extent * extent * extent, 0.0);
  std::size_t v = 0;
  for (std::size_t i = 0; i < extent; ++i) {
    for (std::size_t j = 0; j < extent; ++j) {
      for (std::size_t k = 0; k < extent; ++k, ++v) {
        const double p[3] = {static_cast<double>(i), static_cast<double>(j),
                             static_cast<double>(k)};
        for (const Ellipsoid& e : shapes) {
          double q = 0.0;
          for (int a = 0; a < 3; ++a) {
            const double t = (p[a] - e.center[a]) / e.radius[a];
            q += t * t;
          }
          if (q <= 1.0) {
            mask[v] = 1.0;
            break;
          }
        }
      }
    }
  }
  return BinaryMask(Volume({extent, extent, extent}, std::move(mask)));
}

Sample generate_one(const SyntheticSpec& spec, std::uint64_t index) {
  BinaryMask mask = rasterize(spec.extent, draw_ellipsoids(spec, index));
  Rng noise = Rng::stream(spec.seed, "noise", index);
  std::vector<double> image(mask.data().size());
  for (std::size_t v = 0; v < image.size(); ++v) {
    const double base =
        mask.data()[v] == 1.0 ? spec.foreground_mean : spec.background_mean;
    const double value =
        spec.noise_sigma > 0.0 ? base + noise.normal(0.0, spec.noise_sigma)
                               : base;
    image[v] = std::clamp(value, 0.0, 1.0);
  }
  return {Volume(mask.shape(), std::move(image)), std::move(mask)};
}

std::vector<Sample> generate(const SyntheticSpec& spec, std::size_t count) {
  if (count < 1) throw ValidationError("sample count must be >= 1");
  spec.validate();
  std::vector<Sample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(generate_one(spec, i));
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_indices(
    std::size_t total, double ratio, std::uint64_t seed) {
  if (total == 0) throw ValidationError("cannot split an empty sample set");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ValidationError("split ratio must lie in (0,1)");
  }
  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  Rng rng = Rng::stream(seed, "split");
  for (std::size_t i = total; i-- > 1;) {
    std::swap(order[i], order[rng.below(i + 1)]);
  }
  const auto n_train = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(total)));
  return {std::vector<std::size_t>(order.begin(), order.begin() + n_train),
          std::vector<std::size_t>(order.begin() + n_train, order.end())};
}

void save_volume(const std::filesystem::path& path, const Volume& v) {
  write_file(path, kVolumeMagic, v);
}

Volume load_volume(const std::filesystem::path& path) {
  return read_file(path, kVolumeMagic);
}

void save_mask(const std::filesystem::path& path, const BinaryMask& m) {
  write_file(path, kMaskMagic, m.volume());
}

BinaryMask load_mask(const std::filesystem::path& path) {
  Volume v = read_file(path, kMaskMagic);
  try {
    return BinaryMask(std::move(v));
  } catch (const Error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void save_samples(const std::filesystem::path& dir,
                  const std::vector<Sample>& samples) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
  // Stale pairs from an earlier, larger run would be picked up on load.
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (ext == ".fvol" || ext == ".fmsk") std::filesystem::remove(entry.path());
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    save_volume(dir / indexed("image", i, "fvol"), samples[i].image);
    save_mask(dir / indexed("mask", i, "fmsk"), samples[i].mask);
  }
}

std::vector<Sample> load_samples(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError("data directory not found: " + dir.string());
  }
  std::vector<Sample> out;
  for (std::size_t i = 0;; ++i) {
    const auto image = dir / indexed("image", i, "fvol");
    if (!std::filesystem::exists(image)) break;
    const auto mask = dir / indexed("mask", i, "fmsk");
    if (!std::filesystem::exists(mask)) {
      throw IoError("missing mask file " + mask.string());
    }
    Sample s{load_volume(image), load_mask(mask)};
    if (s.image.shape() != s.mask.shape()) {
      throw IoError("image/mask shape mismatch for sample " + std::to_string(i));
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) throw IoError("no samples found in " + dir.string());
  return out;
}

}  // namespace fess
