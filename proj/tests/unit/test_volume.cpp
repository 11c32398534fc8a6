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

#include <cmath>
#include <limits>

#include "fess/error.hpp"
#include "fess/volume.hpp"
#include "helpers.hpp"

namespace fess {
namespace {

TEST(Volume, ConstructorRejectsBadShapes) {
  EXPECT_THROW(Volume({2, 0}, {}), ValidationError);
  EXPECT_THROW(Volume({2, 2}, {1, 2, 3}), ValidationError);
  EXPECT_THROW(Volume({2}, {1, std::numeric_limits<double>::quiet_NaN()}),
               NumericalError);
  EXPECT_THROW(Volume({1}, {std::numeric_limits<double>::infinity()}),
               NumericalError);
}

TEST(Volume, RowMajorIndexing) {
  const Volume v({2, 3}, {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(v.at({0, 2}), 2.0);
  EXPECT_EQ(v.at({1, 0}), 3.0);
  EXPECT_THROW(v.at({2, 0}), ValidationError);
  EXPECT_THROW(v.item(), ValidationError);
  EXPECT_EQ(Volume::scalar(4.5).item(), 4.5);
}

TEST(Elementwise, Mul) {
  const Volume r = elementwise(Volume({2}, {1, 2}), Volume({2}, {3, 4}),
                               ElementwiseOp::kMul);
  EXPECT_EQ(r, Volume({2}, {3, 8}));
}

TEST(Elementwise, AddZerosIsIdentity) {
  Rng rng(1);
  const Volume x = test::random_volume(rng, {3, 4});
  EXPECT_EQ(elementwise(x, Volume::zeros({3, 4}), ElementwiseOp::kAdd), x);
}

TEST(Elementwise, ShapeMismatchNamesBothShapes) {
  try {
    elementwise(Volume::ones({2, 3}), Volume::ones({3, 2}), ElementwiseOp::kMul);
    FAIL() << "expected a shape-mismatch error";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("(2,3)"), std::string::npos) << msg;
    EXPECT_NE(msg.find("(3,2)"), std::string::npos) << msg;
  }
}

TEST(Elementwise, CommutesWithPermutation) {
  Rng rng(2);
  const Volume a = test::random_volume(rng, {2, 3, 4});
  const Volume b = test::random_volume(rng, {2, 3, 4});
  const std::size_t perm[] = {2, 0, 1};
  for (auto op : {ElementwiseOp::kAdd, ElementwiseOp::kSub, ElementwiseOp::kMul}) {
    EXPECT_EQ(permute(elementwise(a, b, op), perm),
              elementwise(permute(a, perm), permute(b, perm), op));
  }
}

TEST(ReduceSum, Examples) {
  EXPECT_EQ(reduce_sum(Volume::ones({2, 2, 2})).item(), 8.0);
  EXPECT_EQ(reduce_sum(Volume::zeros({3, 3})).item(), 0.0);
  const std::size_t last[] = {1};
  EXPECT_EQ(reduce_sum(Volume({2, 2}, {1, 2, 3, 4}), last), Volume({2}, {3, 7}));
  const std::size_t bad[] = {2};
  EXPECT_THROW(reduce_sum(Volume::ones({2, 2}), bad), ValidationError);
}

TEST(ReduceSum, MatchesSequentialSum) {
  Rng rng(3);
  const Volume a = test::random_volume(rng, {10, 10, 100});
  double seq = 0.0;
  for (double x : a.data()) seq += x;
  EXPECT_NEAR(reduce_sum(a).item(), seq, 1e-12 * std::abs(seq) + 1e-12);
}

TEST(ReduceSum, MiddleAxis) {
  const Volume a({2, 2, 2}, {1, 2, 3, 4, 5, 6, 7, 8});
  const std::size_t mid[] = {1};
  EXPECT_EQ(reduce_sum(a, mid), Volume({2, 2}, {4, 6, 12, 14}));
}

TEST(L2Norm, Examples) {
  EXPECT_EQ(l2_norm(Volume({2}, {3, 4})).item(), 5.0);
  EXPECT_EQ(l2_norm(Volume::zeros({4})).item(), 0.0);
  EXPECT_EQ(l2_norm(Volume::ones({4})).item(), 2.0);
}

TEST(L2Norm, AbsolutelyHomogeneous) {
  Rng rng(4);
  const Volume a = test::random_volume(rng, {5, 7});
  const double n = l2_norm(a).item();
  for (double c : {-3.5, 0.25, 7.0}) {
    EXPECT_NEAR(l2_norm(scale(a, c)).item(), std::abs(c) * n,
                1e-12 * std::abs(c) * n);
  }
}

TEST(Permute, RejectsInvalidPermutation) {
  const std::size_t dup[] = {0, 0};
  EXPECT_THROW(permute(Volume::ones({2, 3}), dup), ValidationError);
}

TEST(BinaryMask, AcceptsOnlyZeroOne) {
  EXPECT_NO_THROW(BinaryMask(Volume({2, 2, 2}, {0, 1, 0, 1, 1, 1, 0, 0})));
  EXPECT_THROW(BinaryMask(Volume({2, 2, 2}, {0, 1, 0, 1, 1, 1, 0, 0.5})),
               ValidationError);
  EXPECT_EQ(BinaryMask(Volume({1, 2, 2}, {1, 1, 0, 1})).foreground(), 3u);
}

}  // namespace
}  // namespace fess
