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

#include "fess/error.hpp"
#include "fess/gradcheck.hpp"
#include "fess/ops.hpp"
#include "fess/tape.hpp"
#include "helpers.hpp"

namespace fess {
namespace {

TEST(Tape, ProductRule) {
  Tape t;
  Var a = t.leaf(Volume({3}, {1, 2, 3}));
  Var b = t.leaf(Volume({3}, {4, 5, 6}));
  t.backward(ops::sum(ops::mul(a, b)));
  EXPECT_EQ(t.grad(a), t.value(b));
  EXPECT_EQ(t.grad(b), t.value(a));
}

TEST(Tape, DetachedInputGetsNoGradient) {
  Tape t;
  Var a = t.leaf(Volume({2}, {1, 2}));
  Var c = t.constant(Volume({2}, {3, 4}));
  t.backward(ops::sum(ops::mul(a, c)));
  EXPECT_EQ(t.grad(c), Volume::zeros({2}));
  EXPECT_TRUE(t.detached(c));
  EXPECT_FALSE(t.detached(a));
}

TEST(Tape, DetachedNodeDeepInGraph) {
  Tape t;
  Var c = t.constant(Volume({2}, {0.5, -1}));
  Var mid = ops::exp(ops::scale(c, 2.0));
  EXPECT_TRUE(t.detached(mid));
  Var a = t.leaf(Volume({2}, {1, 2}));
  t.backward(ops::sum(ops::mul(a, mid)));
  EXPECT_EQ(t.grad(c), Volume::zeros({2}));
  EXPECT_EQ(t.grad(mid), Volume::zeros({2}));
}

TEST(Tape, FanInAccumulates) {
  Tape t;
  Var a = t.leaf(Volume({4}, {1, 2, 3, 4}));
  t.backward(ops::sum(ops::add(a, a)));
  EXPECT_EQ(t.grad(a), Volume::filled({4}, 2.0));
}

TEST(Tape, SumGivesOnes) {
  Tape t;
  Var a = t.leaf(Volume({2, 3}, {1, 2, 3, 4, 5, 6}));
  t.backward(ops::sum(a));
  EXPECT_EQ(t.grad(a), Volume::ones({2, 3}));
}

TEST(Tape, SumOfSquaresGivesTwoX) {
  Tape t;
  const Volume x({3}, {1, -2, 3});
  Var a = t.leaf(x);
  t.backward(ops::sum(ops::mul(a, a)));
  EXPECT_EQ(t.grad(a), scale(x, 2.0));
}

TEST(Tape, SigmoidAtZero) {
  Tape t;
  Var a = t.leaf(Volume::zeros({5}));
  t.backward(ops::sum(ops::sigmoid(a)));
  EXPECT_EQ(t.grad(a), Volume::filled({5}, 0.25));
}

TEST(Tape, BackwardTwiceDoubles) {
  Tape t;
  const Volume x({3}, {1, 2, 3});
  Var a = t.leaf(x);
  Var loss = ops::sum(ops::mul(a, a));
  t.backward(loss);
  const Volume once = t.grad(a);
  t.backward(loss);
  EXPECT_EQ(t.grad(a), scale(once, 2.0));
  t.zero_grad();
  EXPECT_EQ(t.grad(a), Volume::zeros({3}));
}

TEST(Tape, RecordsInTopologicalOrder) {
  Tape t;
  Var a = t.leaf(Volume({1}, {2}));
  Var b = ops::exp(a);
  Var c = ops::mul(a, b);
  EXPECT_LT(a.id, b.id);
  EXPECT_LT(b.id, c.id);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.kind(c), "mul");
}

TEST(Tape, NonScalarLossRejected) {
  Tape t;
  Var a = t.leaf(Volume::ones({2}));
  EXPECT_THROW(t.backward(a), ValidationError);
}

TEST(Tape, CrossTapeMixingRejected) {
  Tape t1, t2;
  Var a = t1.leaf(Volume::ones({2}));
  Var b = t2.leaf(Volume::ones({2}));
  EXPECT_THROW(ops::add(a, b), ValidationError);
}

TEST(FiniteDiff, SumOfSquares) {
  const ScalarFn f = [](Tape&, Var x) { return ops::sum(ops::mul(x, x)); };
  const auto r = finite_diff_check(f, Volume({3}, {1, 2, 3}), 1e-5, 1e-7);
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.max_rel_error, 1e-7);
  EXPECT_EQ(r.checked, 3u);
}

TEST(FiniteDiff, ConstantFunctionPasses) {
  const ScalarFn f = [](Tape& t, Var) { return t.constant(Volume::scalar(3.0)); };
  const auto r = finite_diff_check(f, Volume({4}, {1, 2, 3, 4}), 1e-5, 1e-7);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.max_rel_error, 0.0);
}

TEST(FiniteDiff, DetectsWrongGradient) {
  // x * constant(x): the tape misses half of the quadratic term.
  const ScalarFn f = [](Tape& t, Var x) {
    return ops::add(ops::sum(x), ops::sum(ops::mul(x, t.constant(t.value(x)))));
  };
  const auto r = finite_diff_check(f, Volume({2}, {1, 2}), 1e-5, 1e-5);
  EXPECT_FALSE(r.passed);
}

TEST(FiniteDiff, NonFiniteReportedAsFailure) {
  const ScalarFn f = [](Tape&, Var x) {
    return ops::sum(ops::exp(ops::scale(x, 800.0)));
  };
  const auto r = finite_diff_check(f, Volume({1}, {1.0}), 1e-5, 1e-5);
  EXPECT_FALSE(r.finite);
  EXPECT_FALSE(r.passed);
}

TEST(FiniteDiff, SubsetOfCoordinates) {
  const ScalarFn f = [](Tape&, Var x) { return ops::sum(ops::exp(x)); };
  const std::size_t coords[] = {1, 3};
  const auto r = finite_diff_check(f, Volume({4}, {0, 1, 2, 3}), 1e-5, 1e-6, coords);
  EXPECT_EQ(r.checked, 2u);
  EXPECT_TRUE(r.passed);
}

TEST(SampleCoordinates, DistinctSortedInRange) {
  Rng rng(1);
  const auto c = sample_coordinates(100, 10, rng);
  ASSERT_EQ(c.size(), 10u);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_LT(c[i], 100u);
    if (i) {
      EXPECT_LT(c[i - 1], c[i]);
    }
  }
  EXPECT_EQ(sample_coordinates(3, 10, rng).size(), 3u);
}

}  // namespace
}  // namespace fess
