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
#include "fess/trainer.hpp"
#include "helpers.hpp"

namespace fess {
namespace {

std::vector<Sample> small_set(std::size_t n, std::uint64_t seed) {
  SyntheticSpec s;
  s.extent = 8;
  s.max_radius = 3;
  s.seed = seed;
  return generate(s, n);
}

TrainerConfig small_cfg() {
  TrainerConfig c;
  c.batch_size = 2;
  c.steps = 4;
  c.eval_every = 2;
  c.learning_rate = 0.05;
  c.seed = 11;
  return c;
}

double dice_oracle(std::span<const double> p, std::span<const double> y,
                   double eps) {
  double py = 0, ps = 0, ys = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    py += p[i] * y[i];
    ps += p[i];
    ys += y[i];
  }
  return 1.0 - (2.0 * py + eps) / (ys + ps + eps);
}

TEST(TrainerConfig, Validation) {
  TrainerConfig c;
  EXPECT_NO_THROW(c.validate());
  c.learning_rate = 0.0;
  EXPECT_NO_THROW(c.validate());
  c.learning_rate = -1e-3;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.threshold = 1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.loss.variant = LossVariant::kNtXent;
  c.batch_size = 1;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(TrainStep, FirstStepHasNoContrastiveTerm) {
  const auto data = small_set(2, 1);
  const std::size_t idx[] = {0, 1};
  const Batch batch = make_batch(data, idx);
  TrainerConfig cfg = small_cfg();
  cfg.loss.lambda = 0.5;
  UNet3DParams params = init_params(3);
  EmbeddingBuffer buffer;
  const StepRecord r = train_step(params, batch, buffer, cfg);
  EXPECT_EQ(r.contrastive_term, 0.0);
  EXPECT_DOUBLE_EQ(r.total, 0.5 * r.dice_term);
  ASSERT_TRUE(buffer.embedding.has_value());
  EXPECT_EQ(buffer.embedding->shape(), (Shape{2, 2, 2, 2, 32}));

  const StepRecord r2 = train_step(params, batch, buffer, cfg);
  EXPECT_GT(r2.contrastive_term, 0.0);
  EXPECT_NEAR(r2.total, 0.5 * r2.dice_term + 0.5 * r2.contrastive_term, 1e-15);
}

TEST(TrainStep, PartialBatchKeepsBuffer) {
  const auto data = small_set(3, 2);
  TrainerConfig cfg = small_cfg();
  UNet3DParams params = init_params(3);
  EmbeddingBuffer buffer;
  const std::size_t full[] = {0, 1}, part[] = {2};
  train_step(params, make_batch(data, full), buffer, cfg);
  const Volume kept = *buffer.embedding;
  const StepRecord r = train_step(params, make_batch(data, part), buffer, cfg);
  EXPECT_EQ(r.contrastive_term, 0.0);  // shape mismatch
  EXPECT_EQ(*buffer.embedding, kept);
  const std::size_t three[] = {0, 1, 2};
  EXPECT_THROW(train_step(params, make_batch(data, three), buffer, cfg),
               ValidationError);
}

TEST(TrainStep, ZeroHeadGivesHalfProbabilities) {
  const auto data = small_set(2, 3);
  const std::size_t idx[] = {0, 1};
  const Batch batch = make_batch(data, idx);
  UNet3DParams params = init_params(5);
  params.tensors[10] = Volume::zeros(params.tensors[10].shape());
  params.tensors[11] = Volume::zeros(params.tensors[11].shape());
  EmbeddingBuffer buffer;
  TrainerConfig cfg = small_cfg();
  const StepRecord r = train_step(params, batch, buffer, cfg);
  const std::vector<double> half(batch.images.size(), 0.5);
  EXPECT_NEAR(r.dice_term,
              dice_oracle(half, batch.masks.data(), cfg.loss.epsilon), 1e-14);
}

TEST(Train, ZeroLearningRateFreezesEverything) {
  const auto data = small_set(1, 4);
  TrainerConfig cfg = small_cfg();
  cfg.learning_rate = 0.0;
  cfg.batch_size = 1;
  cfg.steps = 10;
  cfg.eval_every = 5;
  const UNet3DParams init = init_params(cfg.seed);
  const TrainResult res = train(cfg, data, data);
  EXPECT_EQ(res.params, init);
  for (const StepRecord& r : res.log.steps) {
    EXPECT_EQ(r.dice_term, res.log.steps[0].dice_term);
  }
  // A single-sample set repeats the same batch, so the embedding pair is
  // fixed from step 1 onward.
  for (std::size_t s = 2; s < res.log.steps.size(); ++s) {
    EXPECT_EQ(res.log.steps[s].total, res.log.steps[1].total);
  }
  ASSERT_EQ(res.log.evals.size(), 2u);
  EXPECT_EQ(res.log.evals[0].report, res.log.evals[1].report);
}

TEST(Train, DeterministicAndLogged) {
  const auto data = small_set(5, 5);
  const TrainerConfig cfg = small_cfg();
  const TrainResult a = train(cfg, data, data), b = train(cfg, data, data);
  EXPECT_EQ(a.params, b.params);
  ASSERT_EQ(a.log.steps.size(), 4u);
  ASSERT_EQ(a.log.evals.size(), 2u);
  EXPECT_EQ(a.log.evals[0].step, 1u);
  EXPECT_EQ(a.log.evals[1].step, 3u);
  EXPECT_EQ(a.log.evals[1].per_volume_dice.size(), 5u);
  for (std::size_t s = 0; s < 4; ++s) {
    EXPECT_EQ(a.log.steps[s].step, s);
    EXPECT_EQ(a.log.steps[s].total, b.log.steps[s].total);
  }
}

TEST(Train, AffineCombinationEveryStep) {
  const auto data = small_set(6, 6);
  for (double lambda : {0.0, 0.3, 0.9}) {
    TrainerConfig cfg = small_cfg();
    cfg.loss.lambda = lambda;
    cfg.loss.eta = 1.0;
    cfg.steps = 6;
    const TrainResult res = train(cfg, data, data);
    for (const StepRecord& r : res.log.steps) {
      EXPECT_NEAR(r.total,
                  lambda * r.dice_term + (1 - lambda) * r.contrastive_term,
                  1e-12);
    }
  }
}

TEST(Train, LambdaOneMatchesDiceOnly) {
  const auto data = small_set(5, 7);
  TrainerConfig fess = small_cfg();
  fess.loss.lambda = 1.0;
  TrainerConfig dice = small_cfg();
  dice.loss.variant = LossVariant::kDiceOnly;
  const TrainResult a = train(fess, data, data), b = train(dice, data, data);
  EXPECT_EQ(a.params, b.params);
  for (std::size_t s = 0; s < a.log.steps.size(); ++s) {
    EXPECT_EQ(a.log.steps[s].total, b.log.steps[s].total);
  }
}

TEST(Train, RejectsEmptySets) {
  const auto data = small_set(2, 8);
  EXPECT_THROW(train(small_cfg(), {}, data), ValidationError);
  EXPECT_THROW(train(small_cfg(), data, {}), ValidationError);
}

TEST(Evaluate, PooledCountsAndPerVolumeDice) {
  const auto data = small_set(3, 9);
  const UNet3DParams params = init_params(1);
  const EvalRecord ev = evaluate(params, data, 0.5);
  ConfusionCounts pooled;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Tape tape;
    const BoundParams b = bind_params(tape, params, true);
    Shape s{1};
    for (std::size_t e : data[i].image.shape()) s.push_back(e);
    const auto out =
        forward(b, tape.constant(Volume(s, std::vector<double>(data[i].image.data().begin(),
                                                 data[i].image.data().end()))));
    const auto pd = tape.value(out.probs).data();
    const Volume probs(data[i].mask.shape(),
                       std::vector<double>(pd.begin(), pd.end()));
    const ConfusionCounts c = confusion(probs, data[i].mask, 0.5);
    pooled += c;
    EXPECT_DOUBLE_EQ(ev.per_volume_dice[i], report(c).dice);
  }
  EXPECT_EQ(ev.report, report(pooled));
}

TEST(Csv, FormatRoundTrips) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
  TrainLog log;
  log.steps.push_back({0, 0.25, 0.5, 1e-7});
  EvalRecord ev;
  ev.step = 0;
  ev.report = report(ConfusionCounts{1, 1, 1, 1});
  log.evals.push_back(ev);
  const auto dir = test::scratch_dir("csv");
  write_step_csv(dir / "s.csv", log, "hello");
  write_eval_csv(dir / "e.csv", log);
  std::ifstream s(dir / "s.csv"), e(dir / "e.csv");
  std::stringstream ss, es;
  ss << s.rdbuf();
  es << e.rdbuf();
  EXPECT_EQ(ss.str(),
            "# hello\nstep,total,dice_term,contrastive_term\n0,0.25,0.5,1e-07\n");
  EXPECT_EQ(es.str(),
            "eval_step,dice,iou,precision,specificity,sensitivity\n"
            "0,0.5,0.3333333333333333,0.5,0.5,0.5\n");
  EXPECT_THROW(write_step_csv(dir / "no" / "x.csv", log), IoError);
}

}  // namespace
}  // namespace fess
