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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fess/data.hpp"
#include "fess/losses.hpp"
#include "fess/metrics.hpp"
#include "fess/model.hpp"

namespace fess {

struct TrainerConfig {
  std::size_t batch_size = 5;
  double learning_rate = 1e-5;
  std::size_t steps = 200;
  std::size_t eval_every = 50;
  double threshold = kDefaultThreshold;
  LossConfig loss;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Detached embedding of the most recent full batch.
struct EmbeddingBuffer {
  std::optional<Volume> embedding;
};

struct StepRecord {
  std::size_t step = 0;
  double total = 0.0;
  double dice_term = 0.0;
  double contrastive_term = 0.0;
};

struct EvalRecord {
  std::size_t step = 0;
  /// Metrics over the pooled confusion counts of every held-out volume.
  MetricReport report;
  std::vector<double> per_volume_dice;
};

struct TrainLog {
  std::vector<StepRecord> steps;
  std::vector<EvalRecord> evals;
};

struct Batch {
  Volume images;     // (n, i, j, k)
  BinaryMask masks;  // (n, i, j, k)
  std::size_t size() const { return images.extent(0); }
};

Batch make_batch(const std::vector<Sample>& samples,
                 std::span<const std::size_t> indices);

/// One optimization step: forward, loss, backward, SGD update. The
/// contrastive term is zero when the buffer is empty or its shape differs
/// from the current embedding. A full batch (size == cfg.batch_size) replaces
/// the buffer with its detached embedding; a partial batch leaves it alone.
/// Throws NumericalError naming the term when a loss is not finite.
StepRecord train_step(UNet3DParams& params, const Batch& batch,
                      EmbeddingBuffer& buffer, const TrainerConfig& cfg);

/// Held-out evaluation with frozen parameters.
EvalRecord evaluate(const UNet3DParams& params,
                    const std::vector<Sample>& test_set, double threshold);

struct TrainResult {
  UNet3DParams params;
  TrainLog log;
};

/// Runs cfg.steps steps over seeded-shuffled batches (reshuffled on every
/// pass) and evaluates every cfg.eval_every steps and after the final step.
TrainResult train(const TrainerConfig& cfg, const std::vector<Sample>& train_set,
                  const std::vector<Sample>& test_set);

/// Same, starting from the given parameters.
TrainResult train_from(UNet3DParams params, const TrainerConfig& cfg,
                       const std::vector<Sample>& train_set,
                       const std::vector<Sample>& test_set);

/// CSV files: steps (step,total,dice_term,contrastive_term) and evaluations
/// (eval_step,dice,iou,precision,specificity,sensitivity). `comment`, when
/// not empty, is written first as a "# ..." line.
void write_step_csv(const std::filesystem::path& path, const TrainLog& log,
                    const std::string& comment = {});
void write_eval_csv(const std::filesystem::path& path, const TrainLog& log,
                    const std::string& comment = {});

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace fess
