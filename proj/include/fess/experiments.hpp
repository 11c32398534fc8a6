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
#include <string>
#include <vector>

#include "fess/data.hpp"
#include "fess/losses.hpp"
#include "fess/metrics.hpp"
#include "fess/plot.hpp"
#include "fess/trainer.hpp"

namespace fess {

/// Desk-scale experiment protocol.
///
/// A pool of `pool_size` synthetic volumes is generated once and split into a
/// training pool and a shared test set. Every seed below derives from `seed`:
/// the data (SyntheticSpec::seed and TrainerConfig::seed are overwritten),
/// the split, the model initialization of repeat r, and the training subset
/// of each (size, repeat) ablation cell. Variants at the same cell therefore
/// see identical data and identical initial weights.
struct ExperimentSpec {
  std::vector<LossVariant> variants = {LossVariant::kFess,
                                       LossVariant::kDiceOnly,
                                       LossVariant::kNtXent,
                                       LossVariant::kInfoNce};
  std::vector<std::size_t> train_sizes = {10, 20, 30};
  std::size_t repeats = 3;
  std::size_t pool_size = 50;
  double train_fraction = 0.8;
  TrainerConfig trainer;
  SyntheticSpec data;
  std::uint64_t seed = 0;
  /// Worker threads; results do not depend on this value.
  std::size_t jobs = 1;

  void validate() const;
};

/// Seed used for model initialization and batch order in repeat r.
std::uint64_t repeat_seed(std::uint64_t seed, std::size_t repeat);

struct ExperimentData {
  std::vector<Sample> train_pool;
  std::vector<Sample> test_set;
};

ExperimentData prepare_data(const ExperimentSpec& spec);

/// Training-pool indices used by the ablation cell (size, repeat).
std::vector<std::size_t> ablation_subset(std::uint64_t seed,
                                         std::size_t pool_size,
                                         std::size_t size, std::size_t repeat);

struct RunOutcome {
  LossVariant variant = LossVariant::kFess;
  std::size_t train_size = 0;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  MetricReport report;  // final held-out evaluation, pooled counts
  Summary volume_dice;  // per-volume Dice of the same evaluation
};

struct ComparisonRow {
  LossVariant variant = LossVariant::kFess;
  Summary dice, iou, precision, specificity, sensitivity;
};

struct ComparisonResult {
  std::vector<RunOutcome> runs;  // variant-major, then repeat
  std::vector<ComparisonRow> rows;
};

struct AblationPoint {
  LossVariant variant = LossVariant::kFess;
  std::size_t train_size = 0;
  Summary dice;
};

struct AblationResult {
  std::vector<RunOutcome> runs;  // variant-major, then size, then repeat
  std::vector<AblationPoint> points;
};

/// Every variant trained on the whole training pool, once per repeat.
ComparisonResult run_loss_comparison(const ExperimentSpec& spec);
ComparisonResult run_loss_comparison(const ExperimentSpec& spec,
                                     const ExperimentData& data);

/// Every variant at every training size, once per repeat. Throws
/// ValidationError when a size exceeds the training pool.
AblationResult run_data_ablation(const ExperimentSpec& spec);
AblationResult run_data_ablation(const ExperimentSpec& spec,
                                 const ExperimentData& data);

/// One curve per variant: mean Dice with standard-error bars.
std::vector<Curve> ablation_curves(const AblationResult& result);

/// comparison.csv and comparison_raw.csv.
void write_comparison(const std::filesystem::path& dir,
                      const ComparisonResult& result,
                      const std::string& comment);
/// ablation.csv, ablation_agg.csv and ablation.svg.
void write_ablation(const std::filesystem::path& dir,
                    const AblationResult& result, const std::string& comment);

/// Runs both protocols and writes all five files into dir.
void run_experiment(const ExperimentSpec& spec, const std::filesystem::path& dir,
                    const std::string& comment);

}  // namespace fess
