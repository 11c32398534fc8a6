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
#include <fstream>
#include <sstream>

#include "fess/error.hpp"
#include "fess/experiments.hpp"
#include "helpers.hpp"

namespace fess {
namespace {

ExperimentSpec tiny_spec() {
  ExperimentSpec s;
  s.data.extent = 8;
  s.data.max_radius = 3;
  s.pool_size = 6;
  s.train_fraction = 0.5;
  s.train_sizes = {2, 3};
  s.repeats = 2;
  s.trainer.batch_size = 2;
  s.trainer.steps = 2;
  s.trainer.eval_every = 2;
  s.trainer.learning_rate = 0.05;
  s.seed = 21;
  return s;
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t columns(const std::string& line) {
  return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ExperimentSpec, Validation) {
  EXPECT_NO_THROW(tiny_spec().validate());
  ExperimentSpec s = tiny_spec();
  s.variants.clear();
  EXPECT_THROW(s.validate(), ValidationError);
  s = tiny_spec();
  s.repeats = 0;
  EXPECT_THROW(s.validate(), ValidationError);
  s = tiny_spec();
  s.train_fraction = 1.0;
  EXPECT_THROW(s.validate(), ValidationError);
  s = tiny_spec();
  s.pool_size = 1;
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Experiments, PreparedDataSplitsPool) {
  const ExperimentData d = prepare_data(tiny_spec());
  EXPECT_EQ(d.train_pool.size(), 3u);
  EXPECT_EQ(d.test_set.size(), 3u);
  const ExperimentData again = prepare_data(tiny_spec());
  EXPECT_EQ(d.train_pool[0].image, again.train_pool[0].image);
}

TEST(Experiments, AblationSubsets) {
  const auto a = ablation_subset(1, 10, 4, 0);
  EXPECT_EQ(a, ablation_subset(1, 10, 4, 0));
  ASSERT_EQ(a.size(), 4u);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  EXPECT_LT(a.back(), 10u);
  EXPECT_EQ(ablation_subset(1, 10, 10, 2).size(), 10u);
  EXPECT_THROW(ablation_subset(1, 10, 11, 0), ValidationError);

  ExperimentSpec s = tiny_spec();
  s.train_sizes = {4};
  EXPECT_THROW(run_data_ablation(s), ValidationError);
}

TEST(Experiments, ComparisonShapeAndSummaries) {
  const ExperimentSpec spec = tiny_spec();
  const ComparisonResult r = run_loss_comparison(spec);
  ASSERT_EQ(r.runs.size(), 8u);
  ASSERT_EQ(r.rows.size(), 4u);
  for (std::size_t v = 0; v < 4; ++v) {
    const RunOutcome& a = r.runs[2 * v];
    const RunOutcome& b = r.runs[2 * v + 1];
    EXPECT_EQ(a.variant, spec.variants[v]);
    EXPECT_EQ(a.repeat, 0u);
    EXPECT_EQ(b.repeat, 1u);
    EXPECT_EQ(a.seed, repeat_seed(spec.seed, 0));
    const double m = (a.report.dice + b.report.dice) / 2;
    const double sd = std::sqrt(((a.report.dice - m) * (a.report.dice - m) +
                                 (b.report.dice - m) * (b.report.dice - m)));
    EXPECT_NEAR(r.rows[v].dice.mean, m, 1e-15);
    EXPECT_NEAR(r.rows[v].dice.stddev, sd, 1e-15);
    EXPECT_EQ(r.rows[v].dice.count, 2u);
  }
  // dice_only and fess at lambda = 1 are the same optimization problem.
  ExperimentSpec one = spec;
  one.trainer.loss.lambda = 1.0;
  one.variants = {LossVariant::kFess};
  const ComparisonResult f = run_loss_comparison(one);
  EXPECT_EQ(f.runs[0].report, r.runs[2].report);
  EXPECT_EQ(f.runs[1].report, r.runs[3].report);
}

TEST(Experiments, JobsDoNotChangeResults) {
  ExperimentSpec a = tiny_spec();
  ExperimentSpec b = tiny_spec();
  b.jobs = 3;
  const AblationResult ra = run_data_ablation(a), rb = run_data_ablation(b);
  ASSERT_EQ(ra.runs.size(), 16u);
  ASSERT_EQ(ra.points.size(), 8u);
  for (std::size_t i = 0; i < ra.runs.size(); ++i) {
    EXPECT_EQ(ra.runs[i].report, rb.runs[i].report);
  }
}

TEST(Experiments, WritesAllFiles) {
  const auto dir = test::scratch_dir("experiment");
  run_experiment(tiny_spec(), dir / "out", "seed=21");
  const auto cmp = lines_of(dir / "out" / "comparison.csv");
  ASSERT_EQ(cmp.size(), 6u);
  EXPECT_EQ(cmp[0], "# seed=21");
  EXPECT_EQ(columns(cmp[1]), 11u);
  EXPECT_EQ(cmp[2].rfind("fess,", 0), 0u);

  const auto raw = lines_of(dir / "out" / "comparison_raw.csv");
  ASSERT_EQ(raw.size(), 10u);
  for (std::size_t i = 1; i < raw.size(); ++i) EXPECT_EQ(columns(raw[i]), 10u);

  const auto abl = lines_of(dir / "out" / "ablation.csv");
  ASSERT_EQ(abl.size(), 18u);
  EXPECT_EQ(abl[1], "variant,train_size,seed,dice");
  const auto agg = lines_of(dir / "out" / "ablation_agg.csv");
  ASSERT_EQ(agg.size(), 10u);
  EXPECT_EQ(agg[1], "variant,train_size,dice_mean,dice_stderr,repeats");

  // Standard error recomputed from the raw rows.
  std::vector<double> dices;
  for (std::size_t i = 2; i < abl.size(); ++i) {
    if (abl[i].rfind("fess,2,", 0) == 0) {
      dices.push_back(std::stod(abl[i].substr(abl[i].rfind(',') + 1)));
    }
  }
  ASSERT_EQ(dices.size(), 2u);
  const double se = std::fabs(dices[0] - dices[1]) / 2.0;
  const std::string& row = agg[2];
  ASSERT_EQ(row.rfind("fess,2,", 0), 0u);
  std::vector<std::string> f;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
  EXPECT_NEAR(std::stod(f[3]), se, 1e-15);
  EXPECT_EQ(f[4], "2");

  const std::string svg = slurp(dir / "out" / "ablation.svg");
  EXPECT_EQ(svg.rfind("<!-- seed=21 -->", 0), 0u);
}

TEST(Plot, TwoCurvesAndStableBytes) {
  const std::vector<Curve> curves{
      {"a", {{10, 0.5, 0.1}, {20, 0.6, 0.05}}},
      {"b", {{10, 0.4, 0.0}, {20, 0.7, 0.02}}}};
  const std::string svg = render_svg(curves, "x--y");
  EXPECT_EQ(svg, render_svg(curves, "x--y"));
  std::size_t polylines = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos;
       p = svg.find("<polyline", p + 1)) {
    ++polylines;
  }
  EXPECT_EQ(polylines, 2u);
  EXPECT_EQ(svg.find("x--y"), std::string::npos);
  EXPECT_NE(svg.find(">a<"), std::string::npos);
  EXPECT_THROW(render_svg({}, ""), ValidationError);
  EXPECT_THROW(render_svg({{"empty", {}}}, ""), ValidationError);
  const auto dir = test::scratch_dir("plot");
  EXPECT_THROW(emit_plot(curves, dir / "missing" / "p.svg", ""), IoError);
  emit_plot(curves, dir / "p.svg", "");
  EXPECT_EQ(slurp(dir / "p.svg"), render_svg(curves, ""));
}

TEST(Plot, AblationCurvesUseStandardError) {
  AblationResult r;
  r.points = {{LossVariant::kFess, 10, {0.5, 0.2, 0.1, 4}},
              {LossVariant::kFess, 20, {0.6, 0.2, 0.1, 4}},
              {LossVariant::kDiceOnly, 10, {0.4, 0.0, 0.0, 4}}};
  const auto c = ablation_curves(r);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].label, "fess");
  ASSERT_EQ(c[0].points.size(), 2u);
  EXPECT_EQ(c[0].points[1].x, 20.0);
  EXPECT_EQ(c[0].points[1].error, 0.1);
}

}  // namespace
}  // namespace fess
