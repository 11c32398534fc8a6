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

#include "fess/trainer.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "fess/error.hpp"
#include "fess/rng.hpp"

namespace fess {

void TrainerConfig::validate() const {
  if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("learning_rate must be a finite value >= 0");
  }
  if (steps < 1) throw ValidationError("steps must be >= 1");
  if (eval_every < 1) throw ValidationError("eval_every must be >= 1");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("threshold must lie in (0,1)");
  }
  loss.validate();
  if ((loss.variant == LossVariant::kNtXent ||
       loss.variant == LossVariant::kInfoNce) &&
      batch_size < 2) {
    throw ValidationError(std::string(to_string(loss.variant)) +
                          " needs batch_size >= 2");
  }
}

Batch make_batch(const std::vector<Sample>& samples,
                 std::span<const std::size_t> indices) {
  if (indices.empty()) throw ValidationError("empty batch");
  const Shape& s = samples.at(indices[0]).image.shape();
  const std::size_t voxels = shape_size(s);
  std::vector<double> images, masks;
  images.reserve(indices.size() * voxels);
  masks.reserve(indices.size() * voxels);
  for (std::size_t i : indices) {
    const Sample& sample = samples.at(i);
    if (sample.image.shape() != s) {
      throw ValidationError("batch samples must share one shape");
    }
    images.insert(images.end(), sample.image.data().begin(),
                  sample.image.data().end());
    masks.insert(masks.end(), sample.mask.data().begin(),
                 sample.mask.data().end());
  }
  Shape shape{indices.size()};
  shape.insert(shape.end(), s.begin(), s.end());
  return {Volume(shape, std::move(images)),
          BinaryMask(Volume(shape, std::move(masks)))};
}

StepRecord train_step(UNet3DParams& params, const Batch& batch,
                      EmbeddingBuffer& buffer, const TrainerConfig& cfg) {
  if (batch.size() > cfg.batch_size) {
    throw ValidationError("batch of " + std::to_string(batch.size()) +
                          " exceeds batch_size " +
                          std::to_string(cfg.batch_size));
  }
  Tape tape;
  const BoundParams bound = bind_params(tape, params);
  ForwardOutput out;
  try {
    out = forward(bound, tape.constant(batch.images));
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("forward pass: ") + e.what());
  }
  const Volume& embedding = tape.value(out.embedding);

  std::optional<EmbeddingPair> pair;
  if (cfg.loss.variant != LossVariant::kDiceOnly && buffer.embedding &&
      buffer.embedding->shape() == embedding.shape()) {
    pair = EmbeddingPair{out.embedding, tape.constant(*buffer.embedding)};
  }

  FessTerms terms;
  try {
    terms = loss_fess(out.probs, batch.masks, pair, cfg.loss);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("loss: ") + e.what());
  }

  StepRecord rec;
  rec.total = tape.value(terms.total).item();
  rec.dice_term = tape.value(terms.dice).item();
  rec.contrastive_term =
      terms.contrastive ? tape.value(*terms.contrastive).item() : 0.0;

  tape.backward(terms.total);
  sgd_step(params, collect_grads(tape, bound), cfg.learning_rate);

  if (batch.size() == cfg.batch_size) buffer.embedding = embedding;
  return rec;
}

EvalRecord evaluate(const UNet3DParams& params,
                    const std::vector<Sample>& test_set, double threshold) {
  if (test_set.empty()) throw ValidationError("empty evaluation set");
  EvalRecord rec;
  ConfusionCounts pooled;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const std::size_t idx[] = {i};
    const Batch batch = make_batch(test_set, idx);
    Tape tape;
    const BoundParams bound = bind_params(tape, params, /*frozen=*/true);
    ForwardOutput out = forward(bound, tape.constant(batch.images));
    const ConfusionCounts c =
        confusion(tape.value(out.probs), batch.masks, threshold);
    pooled += c;
    rec.per_volume_dice.push_back(report(c).dice);
  }
  rec.report = report(pooled);
  return rec;
}

TrainResult train(const TrainerConfig& cfg,
                  const std::vector<Sample>& train_set,
                  const std::vector<Sample>& test_set) {
  const std::size_t channels = 1;
  return train_from(init_params(cfg.seed, channels), cfg, train_set, test_set);
}

TrainResult train_from(UNet3DParams params, const TrainerConfig& cfg,
                       const std::vector<Sample>& train_set,
                       const std::vector<Sample>& test_set) {
  cfg.validate();
  if (train_set.empty()) throw ValidationError("empty training set");
  if (test_set.empty()) throw ValidationError("empty test set");

  TrainResult result{std::move(params), {}};
  EmbeddingBuffer buffer;
  Rng order_rng = Rng::stream(cfg.seed, "batch_order");
  std::vector<std::size_t> order(train_set.size());
  std::size_t cursor = order.size();  // forces a shuffle before step 0

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    if (cursor >= order.size()) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      for (std::size_t i = order.size(); i-- > 1;) {
        std::swap(order[i], order[order_rng.below(i + 1)]);
      }
      cursor = 0;
    }
    const std::size_t take = std::min(cfg.batch_size, order.size() - cursor);
    const Batch batch = make_batch(
        train_set, std::span<const std::size_t>(order).subspan(cursor, take));
    cursor += take;

    StepRecord rec;
    try {
      rec = train_step(result.params, batch, buffer, cfg);
    } catch (const NumericalError& e) {
      throw NumericalError("step " + std::to_string(step) + ": " + e.what());
    }
    rec.step = step;
    result.log.steps.push_back(rec);

    if ((step + 1) % cfg.eval_every == 0 || step + 1 == cfg.steps) {
      EvalRecord ev = evaluate(result.params, test_set, cfg.threshold);
      ev.step = step;
      result.log.evals.push_back(std::move(ev));
    }
  }
  return result;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path,
                       const std::string& comment) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  if (!comment.empty()) out << "# " << comment << '\n';
  return out;
}

}  // namespace

void write_step_csv(const std::filesystem::path& path, const TrainLog& log,
                    const std::string& comment) {
  std::ofstream out = open_csv(path, comment);
  out << "step,total,dice_term,contrastive_term\n";
  for (const StepRecord& r : log.steps) {
    out << r.step << ',' << format_double(r.total) << ','
        << format_double(r.dice_term) << ','
        << format_double(r.contrastive_term) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_eval_csv(const std::filesystem::path& path, const TrainLog& log,
                    const std::string& comment) {
  std::ofstream out = open_csv(path, comment);
  out << "eval_step,dice,iou,precision,specificity,sensitivity\n";
  for (const EvalRecord& e : log.evals) {
    const MetricReport& r = e.report;
    out << e.step << ',' << format_double(r.dice) << ','
        << format_double(r.iou) << ',' << format_double(r.precision) << ','
        << format_double(r.specificity) << ','
        << format_double(r.sensitivity) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace fess
