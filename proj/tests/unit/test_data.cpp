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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "fess/data.hpp"
#include "fess/error.hpp"
#include "helpers.hpp"

namespace fess {
namespace {

std::size_t brute_force_count(std::size_t extent, const std::vector<Ellipsoid>& es) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < extent; ++i)
    for (std::size_t j = 0; j < extent; ++j)
      for (std::size_t k = 0; k < extent; ++k) {
        const double p[3] = {double(i), double(j), double(k)};
        bool inside = false;
        for (const Ellipsoid& e : es) {
          double q = 0;
          for (int a = 0; a < 3; ++a) {
            const double d = (p[a] - e.center[a]) / e.radius[a];
            q += d * d;
          }
          inside = inside || q <= 1.0;
        }
        n += inside;
      }
  return n;
}

TEST(SyntheticSpec, Validation) {
  SyntheticSpec s;
  EXPECT_NO_THROW(s.validate());
  s.extent = 10;
  EXPECT_THROW(s.validate(), ValidationError);
  s = {};
  s.max_radius = 8;
  EXPECT_THROW(s.validate(), ValidationError);
  s = {};
  s.noise_sigma = -1;
  EXPECT_THROW(s.validate(), ValidationError);
  EXPECT_THROW(generate(SyntheticSpec{}, 0), ValidationError);
}

TEST(Generate, Deterministic) {
  SyntheticSpec s;
  s.seed = 4;
  const auto a = generate(s, 3), b = generate(s, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i].image, b[i].image);
    EXPECT_EQ(a[i].mask, b[i].mask);
  }
  s.seed = 5;
  EXPECT_NE(generate(s, 1)[0].image, a[0].image);
}

TEST(Generate, NoiselessImageHasTwoLevels) {
  SyntheticSpec s;
  s.noise_sigma = 0;
  for (const Sample& smp : generate(s, 3)) {
    for (std::size_t v = 0; v < smp.image.size(); ++v) {
      EXPECT_EQ(smp.image[v], smp.mask.data()[v] == 1.0 ? 0.8 : 0.2);
    }
  }
}

TEST(Generate, ImageClippedAndForegroundFraction) {
  SyntheticSpec s;
  s.seed = 9;
  for (const Sample& smp : generate(s, 20)) {
    for (double v : smp.image.data()) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
    const double frac =
        static_cast<double>(smp.mask.foreground()) / static_cast<double>(smp.image.size());
    EXPECT_GT(frac, 0.0);
    EXPECT_LT(frac, 0.5);
    EXPECT_EQ(smp.image.shape(), smp.mask.shape());
  }
}

TEST(Rasterize, CenteredBallOfRadiusTwo) {
  // Lattice points with x^2 + y^2 + z^2 <= 4: 1 + 6 + 12 + 8 + 6.
  const std::vector<Ellipsoid> e{{{8, 8, 8}, {2, 2, 2}}};
  EXPECT_EQ(rasterize(16, e).foreground(), 33u);
  EXPECT_EQ(brute_force_count(16, e), 33u);
}

TEST(Rasterize, MatchesBruteForceOnSeededSpecs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SyntheticSpec s;
    s.seed = seed;
    s.extent = seed % 2 ? 16 : 12;
    s.max_radius = seed % 2 ? 5.0 : 4.0;
    const auto shapes = draw_ellipsoids(s, seed);
    ASSERT_GE(shapes.size(), 1u);
    ASSERT_LE(shapes.size(), 3u);
    for (const Ellipsoid& e : shapes) {
      for (int a = 0; a < 3; ++a) {
        EXPECT_GE(e.radius[a], 2.0);
        EXPECT_LE(e.radius[a], s.max_radius);
        EXPECT_GE(e.center[a] - e.radius[a], 0.0);
        EXPECT_LE(e.center[a] + e.radius[a], double(s.extent) - 1.0);
      }
    }
    EXPECT_EQ(rasterize(s.extent, shapes).foreground(),
              brute_force_count(s.extent, shapes));
    EXPECT_EQ(generate_one(s, seed).mask, rasterize(s.extent, shapes));
  }
}

TEST(Split, Sizes) {
  auto [a, b] = split_indices(10, 0.8, 1);
  EXPECT_EQ(a.size(), 8u);
  EXPECT_EQ(b.size(), 2u);
  auto [c, d] = split_indices(5, 0.8, 1);
  EXPECT_EQ(c.size(), 4u);
  EXPECT_EQ(d.size(), 1u);
  EXPECT_THROW(split_indices(0, 0.8, 1), ValidationError);
  EXPECT_THROW(split_indices(5, 1.0, 1), ValidationError);
}

TEST(Split, IsPartition) {
  for (double ratio : {0.1, 0.25, 0.5, 0.8, 0.95}) {
    for (std::size_t total : {1u, 7u, 50u}) {
      auto [a, b] = split_indices(total, ratio, 3);
      std::vector<std::size_t> all = a;
      all.insert(all.end(), b.begin(), b.end());
      std::sort(all.begin(), all.end());
      ASSERT_EQ(all.size(), total);
      for (std::size_t i = 0; i < total; ++i) EXPECT_EQ(all[i], i);
    }
  }
  const std::vector<int> items{5, 5, 6, 7, 8};
  auto [tr, te] = split(items, 0.6, 2);
  std::multiset<int> merged(tr.begin(), tr.end());
  merged.insert(te.begin(), te.end());
  EXPECT_EQ(merged, std::multiset<int>(items.begin(), items.end()));
}

std::string read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_all(const std::filesystem::path& p, const std::string& s) {
  std::ofstream(p, std::ios::binary | std::ios::trunc) << s;
}

TEST(VolumeFile, RoundTripAndLayout) {
  const auto dir = test::scratch_dir("volfile");
  Rng rng(1);
  const Volume v = test::random_volume(rng, {3, 2, 5}, -1e300, 1e300);
  save_volume(dir / "v.fvol", v);
  EXPECT_EQ(load_volume(dir / "v.fvol"), v);
  const std::string bytes = read_all(dir / "v.fvol");
  EXPECT_EQ(bytes.substr(0, 8), "FESSVOL1");
  EXPECT_EQ(bytes.size(), 8u + 4u + 3u * 4u + 30u * 8u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3u);  // rank, little-endian
}

TEST(VolumeFile, CorruptionIsStructured) {
  const auto dir = test::scratch_dir("volfile_bad");
  save_volume(dir / "v.fvol", Volume::ones({2, 2, 2}));
  const std::string good = read_all(dir / "v.fvol");
  for (std::size_t cut : {0ul, 4ul, 9ul, 20ul, good.size() - 3}) {
    write_all(dir / "t.fvol", good.substr(0, cut));
    EXPECT_THROW(load_volume(dir / "t.fvol"), IoError) << cut;
  }
  try {
    load_mask(dir / "v.fvol");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("FESSMSK1"), std::string::npos) << e.what();
  }
  std::string nan = good;
  for (int i = 0; i < 8; ++i) nan[nan.size() - 8 + i] = static_cast<char>(0xff);
  write_all(dir / "nan.fvol", nan);
  EXPECT_THROW(load_volume(dir / "nan.fvol"), IoError);
  EXPECT_THROW(load_volume(dir / "missing.fvol"), IoError);
}

TEST(MaskFile, RejectsNonBinary) {
  const auto dir = test::scratch_dir("maskfile");
  save_volume(dir / "m.fvol", Volume({2}, {0.0, 0.5}));
  std::string bytes = read_all(dir / "m.fvol");
  bytes.replace(0, 8, "FESSMSK1");
  write_all(dir / "m.fmsk", bytes);
  EXPECT_THROW(load_mask(dir / "m.fmsk"), IoError);
  const BinaryMask ok(Volume({1, 2, 2}, {0, 1, 1, 0}));
  save_mask(dir / "ok.fmsk", ok);
  EXPECT_EQ(load_mask(dir / "ok.fmsk"), ok);
}

TEST(SampleDir, RoundTripOverwrites) {
  const auto dir = test::scratch_dir("samples");
  SyntheticSpec s;
  s.extent = 8;
  s.max_radius = 3;
  save_samples(dir, generate(s, 5));
  const auto three = generate(s, 3);
  save_samples(dir, three);
  const auto back = load_samples(dir);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].image, three[i].image);
    EXPECT_EQ(back[i].mask, three[i].mask);
  }
  EXPECT_THROW(load_samples(dir / "nope"), IoError);
}

}  // namespace
}  // namespace fess
